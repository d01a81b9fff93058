#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "mather/convex_profile.hpp"
#include "mather/periodic_graph.hpp"
#include "mather/util.hpp"

namespace mather::pgraph {

using Cell = std::array<long long, 3>;

struct StableNormEstimate {
    Cell h{};
    int N = 1;
    double upper = 0.0;   // d(0, N h) / N, a certified upper bound
    double lower = 0.0;   // subadditive extrapolation (d(0,2Nh) - d(0,Nh)) / N
    double value = 0.0;   // reported estimate = upper
};

namespace detail {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Finite box of cells, vertex-indexed for Dijkstra.
struct Window {
    const PeriodicWeightedGraph* g = nullptr;
    Cell lo{}, hi{};
    std::array<long long, 3> dims{1, 1, 1};
    long long cells = 1;

    Window(const PeriodicWeightedGraph& graph, Cell lo_, Cell hi_) : g(&graph), lo(lo_), hi(hi_) {
        for (int i = 0; i < g->d; ++i) {
            require(lo[i] <= hi[i], "window: empty box");
            dims[i] = hi[i] - lo[i] + 1;
        }
        cells = 1;
        for (int i = 0; i < g->d; ++i) cells *= dims[i];
        require(cells * g->num_vertices <= 40000000ll, "window: too many vertices");
    }
    bool contains(const Cell& c) const {
        for (int i = 0; i < g->d; ++i)
            if (c[i] < lo[i] || c[i] > hi[i]) return false;
        return true;
    }
    long long index(const Cell& c, int vtx) const {
        long long idx = 0;
        for (int i = 0; i < g->d; ++i) idx = idx * dims[i] + (c[i] - lo[i]);
        return idx * g->num_vertices + vtx;
    }
    long long size() const { return cells * g->num_vertices; }
};

// Nonnegative-weights label-setting search from (cell 0, vertex base).
inline std::vector<double> dijkstra(const Window& w, int base_vertex) {
    const auto& g = *w.g;
    std::vector<double> dist(static_cast<std::size_t>(w.size()), kInf);
    using Item = std::pair<double, long long>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;

    // Group edges by source vertex once.
    std::vector<std::vector<const Edge*>> out(static_cast<std::size_t>(g.num_vertices));
    for (const auto& e : g.edges) out[static_cast<std::size_t>(e.u)].push_back(&e);

    const Cell origin{0, 0, 0};
    require(w.contains(origin), "window: origin not inside");
    const long long s = w.index(origin, base_vertex);
    dist[static_cast<std::size_t>(s)] = 0.0;
    heap.push({0.0, s});
    while (!heap.empty()) {
        auto [d, idx] = heap.top();
        heap.pop();
        if (d > dist[static_cast<std::size_t>(idx)]) continue;
        const int vtx = static_cast<int>(idx % g.num_vertices);
        long long rest = idx / g.num_vertices;
        Cell c{};
        for (int i = g.d - 1; i >= 0; --i) {
            c[i] = w.lo[i] + rest % w.dims[i];
            rest /= w.dims[i];
        }
        for (const Edge* e : out[static_cast<std::size_t>(vtx)]) {
            Cell t = c;
            bool inside = true;
            for (int i = 0; i < g.d; ++i) {
                t[i] += e->shift[i];
                if (t[i] < w.lo[i] || t[i] > w.hi[i]) inside = false;
            }
            if (!inside) continue;
            const long long j = w.index(t, e->v);
            const double nd = d + e->weight;
            if (nd < dist[static_cast<std::size_t>(j)]) {
                dist[static_cast<std::size_t>(j)] = nd;
                heap.push({nd, j});
            }
        }
    }
    return dist;
}

// d(base@0, base@target) inside the margin-padded bounding box of the pair,
// re-verified with the margin doubled ("window stability").
inline double window_distance(const PeriodicWeightedGraph& g, const Cell& target, long long margin) {
    g.validate();
    for (int attempt = 0; attempt < 4; ++attempt) {
        Cell lo{}, hi{};
        for (int i = 0; i < g.d; ++i) {
            lo[i] = std::min<long long>(0, target[i]) - margin;
            hi[i] = std::max<long long>(0, target[i]) + margin;
        }
        Window w1(g, lo, hi);
        auto d1 = dijkstra(w1, 0);
        const double a = d1[static_cast<std::size_t>(w1.index(target, 0))];
        require(a < kInf, "stable_norm: disconnected window");

        Cell lo2{}, hi2{};
        for (int i = 0; i < g.d; ++i) {
            lo2[i] = std::min<long long>(0, target[i]) - 2 * margin;
            hi2[i] = std::max<long long>(0, target[i]) + 2 * margin;
        }
        Window w2(g, lo2, hi2);
        auto d2 = dijkstra(w2, 0);
        const double b = d2[static_cast<std::size_t>(w2.index(target, 0))];
        if (std::fabs(a - b) <= 1e-12) return b;
        margin *= 2;  // path wants more room; stabilize before reporting
    }
    throw Error("stable_norm: window did not stabilize under margin doubling");
}

}  // namespace detail

// d(0, N h)/N with window-stability verification; `lower` comes from the
// telescoped two-multiplier difference, which cancels additive connector
// costs (and can only undershoot, d(2Nh) <= 2 d(Nh)).
inline StableNormEstimate stable_norm(const PeriodicWeightedGraph& g, const Cell& h, int N,
                                      long long margin = 3, bool with_lower = true) {
    bool nonzero = false;
    for (int i = 0; i < g.d; ++i)
        if (h[i] != 0) nonzero = true;
    require(nonzero, "stable_norm: h must be nonzero");
    require(N >= 1, "stable_norm: N must be >= 1");
    long long span = 0;
    for (int i = 0; i < g.d; ++i) span = std::max(span, h[i] < 0 ? -h[i] : h[i]);
    require(static_cast<double>(span) * N <= 1e4, "stable_norm: window overflow guard: N*|h|_inf > 1e4");

    Cell target{};
    for (int i = 0; i < g.d; ++i) target[i] = h[i] * N;
    const double dN = detail::window_distance(g, target, margin);

    StableNormEstimate est;
    est.h = h;
    est.N = N;
    est.upper = dN / N;
    est.value = est.upper;
    if (with_lower) {
        Cell target2{};
        for (int i = 0; i < g.d; ++i) target2[i] = 2 * target[i];
        const double d2N = detail::window_distance(g, target2, margin);
        est.lower = std::clamp((d2N - dN) / N, 0.0, est.upper);
    } else {
        est.lower = 0.0;
    }
    return est;
}

// Radial profile of the stable norm in the plane spanned by the integer
// vectors a and b: samples t -> ||a + t b|| on the exact integer combinations
// h_j = J a + j b, using the telescoped estimator so the connector constant
// cancels and the profile stays certifiably convex. Feed the result to
// detect_faces: corners are unit-ball vertices, affine runs are facets.
inline SampledConvexProfile unit_ball_section(const PeriodicWeightedGraph& g, const Cell& a,
                                              const Cell& b, int directions = 33, int N = 1,
                                              long long margin = 3, double tol_convex = 1e-8) {
    // Independence of a and b (all 2x2 minors zero means parallel).
    bool indep = false;
    for (int i = 0; i < g.d && !indep; ++i)
        for (int j = i + 1; j < g.d && !indep; ++j)
            if (a[i] * b[j] - a[j] * b[i] != 0) indep = true;
    require(indep, "unit_ball_section: plane vectors must be independent");
    require(directions >= 9, "unit_ball_section: need at least 9 directions");

    const int J = std::max(2, directions / 4);
    std::vector<Sample> samples;
    samples.reserve(static_cast<std::size_t>(4 * J + 1));
    for (int j = -2 * J; j <= 2 * J; ++j) {
        Cell h{};
        for (int i = 0; i < g.d; ++i) h[i] = static_cast<long long>(J) * a[i] + static_cast<long long>(j) * b[i];
        Cell tN = h, t2N = h;
        for (int i = 0; i < g.d; ++i) {
            tN[i] *= N;
            t2N[i] *= 2 * N;
        }
        const double dN = detail::window_distance(g, tN, margin);
        const double d2N = detail::window_distance(g, t2N, margin);
        samples.push_back({static_cast<double>(j) / J, (d2N - dN) / (static_cast<double>(N) * J)});
    }
    return SampledConvexProfile(std::move(samples), "section", tol_convex);
}

// Number of integer classes h on T^2 with d(0, N h)/N <= T, via a single
// source search over the pruned l^inf box, plus the Minkowski ratio
// count / T^2.
inline std::pair<long long, double> count_classes(const PeriodicWeightedGraph& g, double T, int N = 1,
                                                  long long margin = 3) {
    require(g.d == 2, "count_classes: defined for T^2 graphs");
    require(T > 0.0, "count_classes: T must be positive");
    g.validate();
    const double wmin = g.min_weight();
    const long long smax = g.max_shift();
    const long long hmax =
        static_cast<long long>(std::floor(T * static_cast<double>(smax) / wmin / N)) + 1;
    const double predicted = (2.0 * static_cast<double>(hmax) + 1.0) * (2.0 * static_cast<double>(hmax) + 1.0);
    require(predicted <= 1e7, "count_classes: enumeration guard: predicted count > 1e7");

    const long long R = hmax * N + margin;
    detail::Window w(g, Cell{-R, -R, 0}, Cell{R, R, 0});
    auto dist = detail::dijkstra(w, 0);

    long long count = 0;
    for (long long h1 = -hmax; h1 <= hmax; ++h1)
        for (long long h2 = -hmax; h2 <= hmax; ++h2) {
            const Cell c{h1 * N, h2 * N, 0};
            const double d = dist[static_cast<std::size_t>(w.index(c, 0))];
            if (d / N <= T * (1.0 + 1e-12)) ++count;
        }
    return {count, static_cast<double>(count) / (T * T)};
}

}  // namespace mather::pgraph
