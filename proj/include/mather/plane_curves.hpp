#pragma once

#include <algorithm>
#include <array>
#include <climits>
#include <cmath>
#include <vector>

#include "mather/step_sequence.hpp"
#include "mather/util.hpp"

namespace mather::torus {

using Point3 = std::array<double, 3>;

// Piecewise-linear curve inside the plane z = alpha x + beta y.
struct PlanePolyline {
    std::vector<Point3> vertices;
};

inline PlanePolyline line_polyline(const IrrationalPair& pair, double dx, double dy, double t_max) {
    require(t_max > 0.0 && (dx != 0.0 || dy != 0.0), "line_polyline: degenerate direction");
    const Point3 d{dx, dy, pair.alpha * dx + pair.beta * dy};
    return PlanePolyline{{Point3{0, 0, 0}, Point3{t_max * d[0], t_max * d[1], t_max * d[2]}}};
}

// Lift a lattice walk onto the plane: vertices (x_n, y_n, alpha x_n + beta y_n).
inline PlanePolyline lift_walk(const StepSequence& seq, const IrrationalPair& pair) {
    PlanePolyline pl;
    auto pos = seq.positions();
    pl.vertices.reserve(pos.size());
    for (auto [x, y] : pos) {
        const double xd = static_cast<double>(x), yd = static_cast<double>(y);
        pl.vertices.push_back({xd, yd, pair.alpha * xd + pair.beta * yd});
    }
    return pl;
}

namespace detail {

// Height of a visited fundamental domain: the curve in cell c lies in
// D0 - Z with Z = -c, and l(Z) = z - alpha x - beta y evaluated at Z gives
// alpha c1 + beta c2 - c3.
inline double cell_height(const IrrationalPair& pair, long long cx, long long cy, long long cz) {
    return pair.alpha * static_cast<double>(cx) + pair.beta * static_cast<double>(cy) -
           static_cast<double>(cz);
}

inline double directed_hausdorff(const std::vector<double>& from, const std::vector<double>& to) {
    double worst = 0.0;
    std::size_t j = 0;
    for (double v : from) {
        while (j + 1 < to.size() && to[j + 1] <= v) ++j;
        double best = std::fabs(to[j] - v);
        if (j + 1 < to.size()) best = std::min(best, std::fabs(to[j + 1] - v));
        worst = std::max(worst, best);
    }
    return worst;
}

inline std::vector<double> sorted_unique(std::vector<double> v, double eps = 1e-12) {
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double x : v)
        if (out.empty() || x - out.back() > eps) out.push_back(x);
    return out;
}

}  // namespace detail

struct LemmaBReport {
    double hausdorff_distance = 0.0;
    bool pass = false;
    std::vector<double> side_samples;    // heights via translates of sampled curve points into D0
    std::vector<double> side_traversal;  // heights of the traversed fundamental domains
    double directed_traversal_to_samples = 0.0;
    double directed_samples_to_traversal = 0.0;
};

// Finite-resolution check of l(A0) = closure of l(Z_n): side 1 samples the
// curve and collects every lattice translate landing in the closed unit
// cube; side 2 enumerates the fundamental domains the curve crosses, by
// exact segment arithmetic. Reports the symmetric Hausdorff distance of the
// two height sets.
inline LemmaBReport lemma_b_check(const IrrationalPair& pair, const PlanePolyline& curve,
                                  std::size_t n_samples, double delta) {
    require(curve.vertices.size() >= 2, "lemma_b_check: need a curve");
    require(n_samples >= 2, "lemma_b_check: need at least 2 samples");
    for (const auto& v : curve.vertices)
        require(std::fabs(v[2] - pair.alpha * v[0] - pair.beta * v[1]) <= 1e-9,
                "lemma_b_check: curve vertex off the plane");

    // Side 2: exact cell traversal along every segment.
    std::vector<double> traversal;
    long long crossings = 0;
    std::array<long long, 3> last_cell{LLONG_MAX, LLONG_MAX, LLONG_MAX};
    for (std::size_t s = 0; s + 1 < curve.vertices.size(); ++s) {
        const Point3& a = curve.vertices[s];
        const Point3& b = curve.vertices[s + 1];
        std::vector<double> events{0.0, 1.0};
        for (int c = 0; c < 3; ++c) {
            const double lo = std::min(a[c], b[c]), hi = std::max(a[c], b[c]);
            if (hi - lo < 1e-15) continue;
            for (long long m = static_cast<long long>(std::ceil(lo)); m <= static_cast<long long>(std::floor(hi)); ++m) {
                const double t = (static_cast<double>(m) - a[c]) / (b[c] - a[c]);
                if (t > 0.0 && t < 1.0) events.push_back(t);
            }
        }
        std::sort(events.begin(), events.end());
        for (std::size_t e = 0; e + 1 < events.size(); ++e) {
            if (events[e + 1] - events[e] < 1e-15) continue;
            const double tm = 0.5 * (events[e] + events[e + 1]);
            std::array<long long, 3> cell{};
            for (int c = 0; c < 3; ++c)
                cell[c] = static_cast<long long>(std::floor(a[c] + tm * (b[c] - a[c])));
            if (cell != last_cell) {
                traversal.push_back(detail::cell_height(pair, cell[0], cell[1], cell[2]));
                last_cell = cell;
                ++crossings;
            }
        }
    }
    require(crossings >= 2, "lemma_b_check: degenerate curve, no domain crossings");

    // Side 1: points along the curve at golden-ratio low-discrepancy
    // arclength positions (equispaced sampling can resonate with the curve's
    // crossing pattern and starve parts of the height range), each
    // translated into the closed cube by every admissible Z; the collected
    // value is l(Z), which for Z = -c equals the cell height again.
    std::vector<double> samples;
    std::vector<double> cumlen(curve.vertices.size(), 0.0);
    for (std::size_t s = 0; s + 1 < curve.vertices.size(); ++s) {
        const Point3& a = curve.vertices[s];
        const Point3& b = curve.vertices[s + 1];
        cumlen[s + 1] = cumlen[s] + std::sqrt((b[0] - a[0]) * (b[0] - a[0]) +
                                              (b[1] - a[1]) * (b[1] - a[1]) +
                                              (b[2] - a[2]) * (b[2] - a[2]));
    }
    const double total = cumlen.back();
    require(total > 0.0, "lemma_b_check: zero-length curve");
    const double golden = 0.6180339887498949;
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double pos = total * mod1((static_cast<double>(i) + 0.5) * golden);
        const auto it = std::upper_bound(cumlen.begin(), cumlen.end(), pos);
        const std::size_t seg = std::min(curve.vertices.size() - 2,
                                         static_cast<std::size_t>(std::max<std::ptrdiff_t>(
                                             0, (it - cumlen.begin()) - 1)));
        const double len = cumlen[seg + 1] - cumlen[seg];
        const double t = len > 0 ? (pos - cumlen[seg]) / len : 0.0;
        const Point3& a = curve.vertices[seg];
        const Point3& b = curve.vertices[seg + 1];
        const Point3 w{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])};
        // Translate by Z = -floor(w) per coordinate. Curves that ride cell
        // faces (integer coordinates throughout, like the lifted avoid walk)
        // would otherwise pick up both closed-cube translates of every
        // sample; the floor convention keeps the two sides of the check on
        // the same fundamental-domain assignment.
        const long long zx = -static_cast<long long>(std::floor(w[0]));
        const long long zy = -static_cast<long long>(std::floor(w[1]));
        const long long zz = -static_cast<long long>(std::floor(w[2]));
        samples.push_back(static_cast<double>(zz) - pair.alpha * static_cast<double>(zx) -
                          pair.beta * static_cast<double>(zy));
    }

    LemmaBReport rep;
    rep.side_samples = detail::sorted_unique(std::move(samples));
    rep.side_traversal = detail::sorted_unique(std::move(traversal));
    rep.directed_traversal_to_samples = detail::directed_hausdorff(rep.side_traversal, rep.side_samples);
    rep.directed_samples_to_traversal = detail::directed_hausdorff(rep.side_samples, rep.side_traversal);
    rep.hausdorff_distance = std::max(rep.directed_traversal_to_samples, rep.directed_samples_to_traversal);
    rep.pass = rep.hausdorff_distance <= delta;
    return rep;
}

struct BoundedLineReport {
    CoverageReport coverage;  // density of translate heights inside I
    double interval_lo = 0.0;
    double interval_hi = 0.0;
    std::size_t translate_count = 0;  // |E| within the search window
    std::size_t orbit_checked = 0;    // translates verified against the curve orbit
    std::size_t orbit_misses = 0;     // translates with no curve point within 2R (+ slack)
};

// For a rational-direction line D inside the plane and tube radius R:
// E = { z in Z^3 : D + z inside V_R } projects under v = (-alpha,-beta,1)
// onto a subset of an interval I that the closure of the curve heights must
// contain. Generates the staircase curve tracking D, enumerates E on the
// side the curve orbit realizes, and measures delta-density of E.v inside I.
inline BoundedLineReport bounded_line_check(const IrrationalPair& pair, long long p, long long q,
                                            double R, std::size_t n, double delta = 0.01) {
    require(p != 0 || q != 0, "bounded_line_check: zero direction");
    require(R > 0.0, "bounded_line_check: R must be positive");
    require(n >= 16, "bounded_line_check: n too small");

    const Point3 dir{static_cast<double>(p), static_cast<double>(q),
                     pair.alpha * static_cast<double>(p) + pair.beta * static_cast<double>(q)};
    const double dn = std::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]);
    const Point3 du{dir[0] / dn, dir[1] / dn, dir[2] / dn};

    // Staircase walk tracking (p, q); Bresenham on absolute progress.
    const long long ap = p < 0 ? -p : p, aq = q < 0 ? -q : q;
    StepSequence walk;
    walk.steps.reserve(n);
    {
        long long xa = 0, ya = 0;
        for (std::size_t i = 0; i < n; ++i) {
            bool take_x;
            if (ap == 0) take_x = false;
            else if (aq == 0) take_x = true;
            else take_x = std::llabs((xa + 1) * aq - ya * ap) <= std::llabs(xa * aq - (ya + 1) * ap);
            if (take_x) {
                ++xa;
                walk.steps.push_back(p > 0 ? Step::Right : Step::Left);
            } else {
                ++ya;
                walk.steps.push_back(q > 0 ? Step::Up : Step::Down);
            }
        }
    }
    const PlanePolyline curve = lift_walk(walk, pair);

    // Premise: the curve must stay within R of D.
    double dev = 0.0;
    for (const auto& w : curve.vertices) {
        const double along = w[0] * du[0] + w[1] * du[1] + w[2] * du[2];
        const double ox = w[0] - along * du[0], oy = w[1] - along * du[1], oz = w[2] - along * du[2];
        dev = std::max(dev, std::sqrt(ox * ox + oy * oy + oz * oz));
    }
    if (dev > R)
        fail("bounded_line_check: staircase curve deviates %.3f > R = %.3f from the line; increase R",
             dev, R);

    // E on the side realized by the orbit (z ~ -gamma(t)): follow the tube
    // instead of scanning a box, and stay within the span the curve covers.
    const auto& endpos = curve.vertices.back();
    const double along_extent =
        std::fabs(endpos[0] * du[0] + endpos[1] * du[1] + endpos[2] * du[2]);
    std::vector<std::array<long long, 3>> translates;
    std::vector<double> hts;
    auto try_z = [&](long long zx, long long zy, long long zz) {
        const double along = zx * du[0] + zy * du[1] + zz * du[2];
        if (along > R + 1.0 || along < -(along_extent - 2.0 * R - 2.0)) return;
        const double ox = zx - along * du[0], oy = zy - along * du[1], oz = zz - along * du[2];
        if (std::sqrt(ox * ox + oy * oy + oz * oz) <= R) {
            translates.push_back({zx, zy, zz});
            hts.push_back(static_cast<double>(zz) - pair.alpha * static_cast<double>(zx) -
                          pair.beta * static_cast<double>(zy));
        }
    };
    const double tube = R + 2.0;
    if (ap >= aq) {
        const long long x0 = -static_cast<long long>(std::fabs(endpos[0])) - 2;
        const long long width = static_cast<long long>(tube * dn / std::max<long long>(ap, 1)) + 2;
        for (long long zx = std::min<long long>(x0, 0); zx <= std::max<long long>(-x0, 0); ++zx) {
            if ((p > 0 && zx > 1) || (p < 0 && zx < -1)) continue;  // orbit side only
            const long long yc = (ap != 0) ? (zx * q) / p : 0;
            for (long long zy = yc - width; zy <= yc + width; ++zy) {
                const double zc = pair.alpha * static_cast<double>(zx) + pair.beta * static_cast<double>(zy);
                for (long long zz = static_cast<long long>(std::floor(zc - tube));
                     zz <= static_cast<long long>(std::ceil(zc + tube)); ++zz)
                    try_z(zx, zy, zz);
            }
        }
    } else {
        const long long y0 = -static_cast<long long>(std::fabs(endpos[1])) - 2;
        const long long width = static_cast<long long>(tube * dn / std::max<long long>(aq, 1)) + 2;
        for (long long zy = std::min<long long>(y0, 0); zy <= std::max<long long>(-y0, 0); ++zy) {
            if ((q > 0 && zy > 1) || (q < 0 && zy < -1)) continue;
            const long long xc = (aq != 0) ? (zy * p) / q : 0;
            for (long long zx = xc - width; zx <= xc + width; ++zx) {
                const double zc = pair.alpha * static_cast<double>(zx) + pair.beta * static_cast<double>(zy);
                for (long long zz = static_cast<long long>(std::floor(zc - tube));
                     zz <= static_cast<long long>(std::ceil(zc + tube)); ++zz)
                    try_z(zx, zy, zz);
            }
        }
    }
    std::vector<double> uniq = detail::sorted_unique(hts);
    if (uniq.size() < 2)
        throw Error("bounded_line_check: no nonzero translate of D inside V_R; enlarge R or the window");

    BoundedLineReport rep;
    rep.translate_count = translates.size();
    rep.interval_lo = uniq.front();
    rep.interval_hi = uniq.back();
    CoverageReport cov;
    cov.n = uniq.size();
    cov.resolution = delta;
    cov.lo = rep.interval_lo;
    cov.hi = rep.interval_hi;
    cov.circular = false;
    double largest = 0.0, covered_loss = 0.0;
    for (std::size_t i = 0; i + 1 < uniq.size(); ++i) {
        const double gap = uniq[i + 1] - uniq[i];
        largest = std::max(largest, gap);
        covered_loss += std::max(0.0, gap - 2.0 * delta);
    }
    cov.largest_gap = largest;
    const double len = rep.interval_hi - rep.interval_lo;
    cov.covered_measure = len > 0 ? std::min(1.0, std::max(0.0, 1.0 - covered_loss / len)) : 1.0;
    rep.coverage = cov;

    // Orbit realization: each translate should come within 2R (plus one cell
    // of staircase slack) of the origin along the curve.
    const std::size_t stride = std::max<std::size_t>(1, translates.size() / 128);
    for (std::size_t i = 0; i < translates.size(); i += stride) {
        const auto& z = translates[i];
        double best = 1e300;
        for (const auto& w : curve.vertices) {
            const double ax = w[0] + z[0], ay = w[1] + z[1], az = w[2] + z[2];
            best = std::min(best, std::sqrt(ax * ax + ay * ay + az * az));
            if (best <= 2.0 * R + 2.0) break;
        }
        ++rep.orbit_checked;
        if (best > 2.0 * R + 2.0) ++rep.orbit_misses;
    }
    return rep;
}

}  // namespace mather::torus
