#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "mather/step_sequence.hpp"
#include "mather/util.hpp"

namespace mather::torus {

// Open subinterval of [0,1]; forbidden sets K are finite unions of these.
struct OpenInterval {
    double lo = 0.0, hi = 0.0;
    bool contains(double v) const { return lo < v && v < hi; }
};

// The m largest middle-third gaps of the triadic Cantor set, in generation
// order (left first inside a generation); m = 2^k - 1 takes whole
// generations, other m truncate the enumeration, which coincides with
// largest-first ordering with the left-first tie-break.
inline std::vector<OpenInterval> cantor_gaps(int m) {
    require(m >= 1, "cantor_gaps: m must be >= 1");
    std::vector<OpenInterval> gaps;
    // Kept Cantor intervals as exact integer fractions num/3^g.
    std::vector<std::pair<long long, long long>> kept{{0, 1}};  // numerators over 3^0
    long long den = 1;
    while (static_cast<int>(gaps.size()) < m) {
        require(den <= (1ll << 40), "cantor_gaps: generation overflow");
        std::vector<std::pair<long long, long long>> next;
        next.reserve(kept.size() * 2);
        std::vector<OpenInterval> generation;
        for (auto [a, b] : kept) {
            // [a,b]/den splits at thirds over den*3
            const long long a3 = a * 3, b3 = b * 3;
            const long long g1 = a3 + (b3 - a3) / 3, g2 = a3 + 2 * (b3 - a3) / 3;
            next.emplace_back(a3, g1);
            next.emplace_back(g2, b3);
            generation.push_back({static_cast<double>(g1) / static_cast<double>(den * 3),
                                  static_cast<double>(g2) / static_cast<double>(den * 3)});
        }
        std::sort(generation.begin(), generation.end(),
                  [](const OpenInterval& x, const OpenInterval& y) { return x.lo < y.lo; });
        for (const auto& g : generation) {
            if (static_cast<int>(gaps.size()) < m) gaps.push_back(g);
        }
        kept = std::move(next);
        den *= 3;
    }
    return gaps;
}

inline bool in_forbidden(const std::vector<OpenInterval>& K, double h) {
    for (const auto& iv : K)
        if (iv.contains(h)) return true;
    return false;
}

struct QcPoint {
    long long x = 0, y = 0, z = 0;
    double height = 0.0;  // alpha x + beta y - z, strictly in (0,1)
};

// Finite window of QC(P) = { (x,y,z) in Z^3 : z < alpha x + beta y < z+1 }.
// Columns whose cut value alpha x + beta y is an integer (only (0,0) for a
// totally irrational pair) contain no point and are reported as degenerate.
struct QuasiCrystalWindow {
    IrrationalPair pair;
    long long xlo = 0, xhi = 0, ylo = 0, yhi = 0;
    std::vector<QcPoint> points;                            // column-major, one per column
    std::vector<std::pair<long long, long long>> degenerate_columns;

    long long columns() const { return (xhi - xlo + 1) * (yhi - ylo + 1); }
    // Index of the point in column (x, y), or -1.
    long long column_index(long long x, long long y) const {
        if (x < xlo || x > xhi || y < ylo || y > yhi) return -1;
        return index_[static_cast<std::size_t>((x - xlo) * (yhi - ylo + 1) + (y - ylo))];
    }

    std::vector<long long> index_;  // built by qc_build
};

inline QuasiCrystalWindow qc_build(const IrrationalPair& pair, long long xlo, long long xhi,
                                   long long ylo, long long yhi) {
    require(xlo <= xhi && ylo <= yhi, "qc_build: empty window");
    const double volume = static_cast<double>(xhi - xlo + 1) * static_cast<double>(yhi - ylo + 1);
    require(volume <= 1e8, "qc_build: window volume > 1e8 rejected");

    QuasiCrystalWindow qc;
    qc.pair = pair;
    qc.xlo = xlo;
    qc.xhi = xhi;
    qc.ylo = ylo;
    qc.yhi = yhi;
    qc.index_.assign(static_cast<std::size_t>(qc.columns()), -1);
    for (long long x = xlo; x <= xhi; ++x)
        for (long long y = ylo; y <= yhi; ++y) {
            const double s = pair.alpha * static_cast<double>(x) + pair.beta * static_cast<double>(y);
            const double z = std::floor(s);
            const double h = s - z;
            if (h <= 1e-11 || h >= 1.0 - 1e-11) {
                qc.degenerate_columns.emplace_back(x, y);
                continue;
            }
            qc.index_[static_cast<std::size_t>((x - xlo) * (yhi - ylo + 1) + (y - ylo))] =
                static_cast<long long>(qc.points.size());
            qc.points.push_back({x, y, static_cast<long long>(z), h});
        }
    return qc;
}

inline QuasiCrystalWindow qc_build(const IrrationalPair& pair, long long N) {
    return qc_build(pair, 0, N, 0, N);
}

struct ComponentStats {
    int id = 0;
    long long size = 0;
    long long xmin = 0, xmax = 0, ymin = 0, ymax = 0, zmin = 0, zmax = 0;
    bool spanning = false;                       // touches both window extremes in x or in y
    std::array<double, 3> direction{0, 0, 0};    // endpoint displacement / chain length, if spanning
};

struct QcComponentReport {
    std::vector<OpenInterval> K;
    long long kept_count = 0;
    std::vector<int> labels;              // per qc point; -1 = removed by K
    std::vector<ComponentStats> components;  // sorted by size descending, then id
    std::map<long long, long long> size_histogram;
    bool any_spanning = false;
};

namespace detail {
struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[static_cast<std::size_t>(a)] != a) {
            parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
            a = parent[static_cast<std::size_t>(a)];
        }
        return a;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
};
}  // namespace detail

// Filters QC(P) by the forbidden height set K, links l^1-distance-1 pairs
// (neighboring columns with equal z; one point per column rules the vertical
// case out), labels components, and reports sizes, bounding boxes and the
// window-spanning proxy for infinite chains with an asymptotic direction.
inline QcComponentReport qc_components(const QuasiCrystalWindow& qc,
                                       const std::vector<OpenInterval>& K) {
    for (const auto& iv : K)
        require(iv.lo >= 0.0 && iv.hi <= 1.0 && iv.lo < iv.hi, "qc_components: K must be open subintervals of [0,1]");

    QcComponentReport rep;
    rep.K = K;
    const auto n = qc.points.size();
    std::vector<char> kept(n, 0);
    for (std::size_t i = 0; i < n; ++i) kept[i] = in_forbidden(K, qc.points[i].height) ? 0 : 1;

    detail::UnionFind uf(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!kept[i]) continue;
        const auto& pt = qc.points[i];
        for (auto [dx, dy] : {std::pair<int, int>{1, 0}, std::pair<int, int>{0, 1}}) {
            const long long j = qc.column_index(pt.x + dx, pt.y + dy);
            if (j < 0 || !kept[static_cast<std::size_t>(j)]) continue;
            if (qc.points[static_cast<std::size_t>(j)].z == pt.z)  // l^1 distance exactly 1
                uf.unite(static_cast<int>(i), static_cast<int>(j));
        }
    }

    rep.labels.assign(n, -1);
    std::map<int, int> root_to_id;
    std::vector<ComponentStats> comps;
    for (std::size_t i = 0; i < n; ++i) {
        if (!kept[i]) continue;
        ++rep.kept_count;
        const int root = uf.find(static_cast<int>(i));
        auto it = root_to_id.find(root);
        int id;
        if (it == root_to_id.end()) {
            id = static_cast<int>(comps.size());
            root_to_id.emplace(root, id);
            ComponentStats cs;
            cs.id = id;
            cs.size = 0;
            cs.xmin = cs.xmax = qc.points[i].x;
            cs.ymin = cs.ymax = qc.points[i].y;
            cs.zmin = cs.zmax = qc.points[i].z;
            comps.push_back(cs);
        } else {
            id = it->second;
        }
        auto& cs = comps[static_cast<std::size_t>(id)];
        ++cs.size;
        cs.xmin = std::min(cs.xmin, qc.points[i].x);
        cs.xmax = std::max(cs.xmax, qc.points[i].x);
        cs.ymin = std::min(cs.ymin, qc.points[i].y);
        cs.ymax = std::max(cs.ymax, qc.points[i].y);
        cs.zmin = std::min(cs.zmin, qc.points[i].z);
        cs.zmax = std::max(cs.zmax, qc.points[i].z);
        rep.labels[i] = id;
    }

    for (auto& cs : comps) {
        cs.spanning = (cs.xmin == qc.xlo && cs.xmax == qc.xhi) || (cs.ymin == qc.ylo && cs.ymax == qc.yhi);
        if (cs.spanning) rep.any_spanning = true;
    }

    // Asymptotic-direction proxy: BFS path between extreme points of each
    // spanning component; report displacement normalized by path length.
    for (auto& cs : comps) {
        if (!cs.spanning) continue;
        const bool use_x = (cs.xmin == qc.xlo && cs.xmax == qc.xhi);
        long long from = -1, to = -1;
        for (std::size_t i = 0; i < n; ++i) {
            if (rep.labels[i] != cs.id) continue;
            const long long key = use_x ? qc.points[i].x : qc.points[i].y;
            if (from < 0 || key < (use_x ? qc.points[static_cast<std::size_t>(from)].x
                                         : qc.points[static_cast<std::size_t>(from)].y))
                from = static_cast<long long>(i);
            if (to < 0 || key > (use_x ? qc.points[static_cast<std::size_t>(to)].x
                                       : qc.points[static_cast<std::size_t>(to)].y))
                to = static_cast<long long>(i);
        }
        // BFS over the component adjacency.
        std::vector<long long> dist(n, -1), queue;
        dist[static_cast<std::size_t>(from)] = 0;
        queue.push_back(from);
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            const long long cur = queue[qi];
            const auto& pt = qc.points[static_cast<std::size_t>(cur)];
            for (auto [dx, dy] : {std::pair<int, int>{1, 0}, std::pair<int, int>{-1, 0},
                                  std::pair<int, int>{0, 1}, std::pair<int, int>{0, -1}}) {
                const long long j = qc.column_index(pt.x + dx, pt.y + dy);
                if (j < 0 || rep.labels[static_cast<std::size_t>(j)] != cs.id) continue;
                if (qc.points[static_cast<std::size_t>(j)].z != pt.z) continue;
                if (dist[static_cast<std::size_t>(j)] >= 0) continue;
                dist[static_cast<std::size_t>(j)] = dist[static_cast<std::size_t>(cur)] + 1;
                queue.push_back(j);
            }
        }
        const long long len = dist[static_cast<std::size_t>(to)];
        if (len > 0) {
            const auto& a = qc.points[static_cast<std::size_t>(from)];
            const auto& b = qc.points[static_cast<std::size_t>(to)];
            cs.direction = {static_cast<double>(b.x - a.x) / static_cast<double>(len),
                            static_cast<double>(b.y - a.y) / static_cast<double>(len),
                            static_cast<double>(b.z - a.z) / static_cast<double>(len)};
        }
    }

    std::sort(comps.begin(), comps.end(), [](const ComponentStats& a, const ComponentStats& b) {
        if (a.size != b.size) return a.size > b.size;
        return a.id < b.id;
    });
    for (const auto& cs : comps) ++rep.size_histogram[cs.size];
    rep.components = std::move(comps);
    return rep;
}

}  // namespace mather::torus
