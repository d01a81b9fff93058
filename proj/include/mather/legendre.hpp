#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mather/convex_profile.hpp"
#include "mather/util.hpp"

namespace mather {

// Homology class h in H_1(M,R) (or a cohomology class when `dual` is set).
struct HomologyVector {
    std::vector<double> coords;
    bool dual = false;

    explicit HomologyVector(std::vector<double> c, bool is_dual = false)
        : coords(std::move(c)), dual(is_dual) {
        require(!coords.empty(), "homology vector: dimension must be >= 1");
        for (double v : coords) require(std::isfinite(v), "homology vector: non-finite coordinate");
    }
    int dim() const { return static_cast<int>(coords.size()); }
};

// Discrete Legendre-Fenchel conjugate: alpha(c) = max_i (c*x_i - v_i).
// The input must pass its convexity certificate; the result is convex by
// construction (upper envelope of affine functions of c).
inline SampledConvexProfile legendre_transform(const SampledConvexProfile& profile,
                                               const std::vector<double>& dual_grid,
                                               double tol_convex = Tolerances{}.convex) {
    require(!dual_grid.empty(), "legendre_transform: empty dual grid");
    if (auto v = profile.violation(tol_convex)) {
        fail("legendre_transform: input not convex at sample %d: "
             "(%.17g,%.17g) (%.17g,%.17g) (%.17g,%.17g), excess %.3e",
             v->index, v->left.x, v->left.value, v->mid.x, v->mid.value,
             v->right.x, v->right.value, v->excess);
    }
    std::vector<double> grid = dual_grid;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    const auto& s = profile.samples();
    std::vector<Sample> out;
    out.reserve(grid.size());
    // The maximizing index is nondecreasing in c for convex data; walk it.
    std::size_t j = 0;
    for (double c : grid) {
        while (j + 1 < s.size() && c * s[j + 1].x - s[j + 1].value >= c * s[j].x - s[j].value) ++j;
        // j can have overshot for a smaller c of a previous iteration; rescan
        // downward as well (grid is sorted, so this only happens once at the start).
        while (j > 0 && c * s[j - 1].x - s[j - 1].value > c * s[j].x - s[j].value) --j;
        out.push_back({c, c * s[j].x - s[j].value});
    }
    return SampledConvexProfile(std::move(out), "legendre(" + profile.provenance() + ")", tol_convex);
}

// Raw one-sided difference quotients to the nearest sampled neighbors.
// `at` must be a sample abscissa with neighbors on both sides.
inline std::pair<double, double> one_sided_derivatives(const SampledConvexProfile& profile, double at) {
    require(profile.size() >= 3, "one_sided_derivatives: need at least 3 samples");
    const int i = profile.find_abscissa(at);
    require(i >= 0, "one_sided_derivatives: `at` is not a sample abscissa");
    require(i > 0 && i + 1 < profile.size(), "one_sided_derivatives: boundary abscissa rejected");
    const double left = (profile.value(i) - profile.value(i - 1)) / (profile.x(i) - profile.x(i - 1));
    const double right = (profile.value(i + 1) - profile.value(i)) / (profile.x(i + 1) - profile.x(i));
    return {left, right};
}

enum class FaceKind { Vertex, Segment, Radial };

// A vertex (tangent cone contains no line), a maximal affine run, or a
// radial face obtained from the restriction t -> beta(t*h).
struct FaceDescriptor {
    FaceKind kind;
    int first = 0, last = 0;        // inclusive sample index range
    double slope_left = 0.0;        // one-sided slopes at a vertex
    double slope_right = 0.0;
    double slope = 0.0;             // affine slope for segment/radial faces
};

namespace detail {
// Max deviation of interior samples from the chord through [first,last].
inline double affine_deviation(const std::vector<Sample>& s, int first, int last) {
    const double x0 = s[first].x, y0 = s[first].value;
    const double slope = (s[last].value - y0) / (s[last].x - x0);
    double dev = 0.0;
    for (int k = first + 1; k < last; ++k)
        dev = std::max(dev, std::fabs(s[k].value - (y0 + slope * (s[k].x - x0))));
    return dev;
}
}  // namespace detail

// Maximal affine runs (>= 3 samples, deviation <= tol_face) are reported as
// segments; interior samples with a slope jump above tol_corner as vertices.
// Vertices may coincide with segment endpoints but never with a segment's
// interior.
inline std::vector<FaceDescriptor> detect_faces(const SampledConvexProfile& profile,
                                                double tol_face = Tolerances{}.face,
                                                double tol_corner = Tolerances{}.corner) {
    require(profile.size() >= 3, "detect_faces: need at least 3 samples");
    const auto& s = profile.samples();
    const int n = profile.size();
    std::vector<double> slope(n - 1);
    for (int i = 0; i + 1 < n; ++i) slope[i] = (s[i + 1].value - s[i].value) / (s[i + 1].x - s[i].x);

    std::vector<FaceDescriptor> faces;
    for (int i = 1; i + 1 < n; ++i) {
        if (slope[i] - slope[i - 1] > tol_corner) {
            FaceDescriptor f;
            f.kind = FaceKind::Vertex;
            f.first = f.last = i;
            f.slope_left = slope[i - 1];
            f.slope_right = slope[i];
            faces.push_back(f);
        }
    }
    // Greedy maximal runs; a vertex inside a candidate run fails the fit.
    int first = 0;
    while (first + 2 < n + 1) {
        int last = first + 1;
        while (last + 1 < n && detail::affine_deviation(s, first, last + 1) <= tol_face &&
               std::fabs(slope[last] - slope[first]) <= tol_corner)
            ++last;
        if (last - first >= 2) {
            FaceDescriptor f;
            f.kind = FaceKind::Segment;
            f.first = first;
            f.last = last;
            f.slope = (s[last].value - s[first].value) / (s[last].x - s[first].x);
            faces.push_back(f);
            first = last;
        } else {
            ++first;
        }
    }
    return faces;
}

// Maximal radial face of beta containing h, computed on the restriction of
// beta to the ray through h: `ray` samples t -> beta(t*h) and `t_of_h` marks
// h itself. Returns the affine run covering it (possibly the single sample).
inline FaceDescriptor radial_face(const SampledConvexProfile& ray, double t_of_h,
                                  double tol_face = Tolerances{}.face) {
    const int i = ray.find_abscissa(t_of_h);
    require(i >= 0, "radial_face: t_of_h is not a sample abscissa");
    const auto& s = ray.samples();
    int first = i, last = i;
    while (first > 0 && detail::affine_deviation(s, first - 1, last) <= tol_face) --first;
    while (last + 1 < ray.size() && detail::affine_deviation(s, first, last + 1) <= tol_face) ++last;
    FaceDescriptor f;
    f.kind = FaceKind::Radial;
    f.first = first;
    f.last = last;
    f.slope = last > first ? (s[last].value - s[first].value) / (s[last].x - s[first].x) : 0.0;
    return f;
}

}  // namespace mather
