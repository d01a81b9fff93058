#pragma once

#include <array>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mather/util.hpp"

namespace mather::pgraph {

struct Edge {
    int u = 0, v = 0;                    // cell-vertex ids
    std::array<long long, 3> shift{};    // target cell offset, first d used
    double weight = 1.0;                 // length units, > 0
};

// Z^d-periodic weighted graph, d = 2 or 3. The symmetric flag means the edge
// list is closed under reversal with negated shift.
struct PeriodicWeightedGraph {
    int d = 2;
    int num_vertices = 1;
    std::vector<Edge> edges;
    bool symmetric = false;

    void validate() const {
        require(d == 2 || d == 3, "pgraph: d must be 2 or 3");
        require(num_vertices >= 1, "pgraph: need at least one cell vertex");
        for (const auto& e : edges) {
            require(e.u >= 0 && e.u < num_vertices && e.v >= 0 && e.v < num_vertices,
                    "pgraph: edge endpoint out of range");
            require(e.weight > 0.0, "pgraph: weights must be positive");
        }
        if (symmetric) require(check_symmetric(), "pgraph: symmetric flag set but edge set not closed under reversal");
    }

    bool check_symmetric() const {
        std::multiset<std::string> keys;
        auto key = [this](int u, int v, const std::array<long long, 3>& s, double w) {
            std::ostringstream os;
            os << u << ' ' << v;
            for (int i = 0; i < d; ++i) os << ' ' << s[i];
            os << ' ' << fmt_g(w, 17);
            return os.str();
        };
        for (const auto& e : edges) keys.insert(key(e.u, e.v, e.shift, e.weight));
        for (const auto& e : edges) {
            std::array<long long, 3> ns{};
            for (int i = 0; i < d; ++i) ns[i] = -e.shift[i];
            auto it = keys.find(key(e.v, e.u, ns, e.weight));
            if (it == keys.end()) return false;
            keys.erase(it);
        }
        return true;
    }

    double min_weight() const {
        double w = edges.empty() ? 1.0 : edges.front().weight;
        for (const auto& e : edges) w = std::min(w, e.weight);
        return w;
    }
    long long max_shift() const {
        long long s = 1;
        for (const auto& e : edges)
            for (int i = 0; i < d; ++i) s = std::max(s, e.shift[i] < 0 ? -e.shift[i] : e.shift[i]);
        return s;
    }

    // Text format:  # pgraph v1 d=<2|3> / v <id> / e <u> <v> <shift...> <weight>
    std::string serialize() const {
        std::ostringstream os;
        os << "# pgraph v1 d=" << d << "\n";
        for (int i = 0; i < num_vertices; ++i) os << "v " << i << "\n";
        for (const auto& e : edges) {
            os << "e " << e.u << " " << e.v;
            for (int i = 0; i < d; ++i) os << " " << e.shift[i];
            os << " " << fmt_g(e.weight) << "\n";
        }
        return os.str();
    }

    static PeriodicWeightedGraph parse(std::istream& in) {
        PeriodicWeightedGraph g;
        std::string line;
        require(static_cast<bool>(std::getline(in, line)), "pgraph: empty input");
        const std::string magic = "# pgraph v1 d=";
        require(line.rfind(magic, 0) == 0, "pgraph: bad header: " + line);
        g.d = std::stoi(line.substr(magic.size()));
        int vcount = 0;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::istringstream row(line);
            std::string tag;
            row >> tag;
            if (tag == "v") {
                int id = -1;
                row >> id;
                require(id == vcount, "pgraph: vertex ids must be consecutive from 0");
                ++vcount;
            } else if (tag == "e") {
                Edge e;
                row >> e.u >> e.v;
                for (int i = 0; i < g.d; ++i) row >> e.shift[i];
                row >> e.weight;
                require(static_cast<bool>(row), "pgraph: malformed edge line: " + line);
                g.edges.push_back(e);
            } else {
                throw Error("pgraph: unknown line: " + line);
            }
        }
        g.num_vertices = vcount;
        g.symmetric = g.check_symmetric();
        g.validate();
        return g;
    }

    static PeriodicWeightedGraph load(const std::string& path) {
        std::ifstream in(path);
        require(static_cast<bool>(in), "pgraph: cannot open " + path);
        return parse(in);
    }
};

namespace detail {
inline void add_sym(PeriodicWeightedGraph& g, int u, int v, std::array<long long, 3> s, double w) {
    g.edges.push_back({u, v, s, w});
    std::array<long long, 3> ns{};
    for (int i = 0; i < 3; ++i) ns[i] = -s[i];
    g.edges.push_back({v, u, ns, w});
}
}  // namespace detail

// Unit-weight nearest-neighbor grid on T^d; its stable norm is l^1.
inline PeriodicWeightedGraph flat_grid(int d) {
    PeriodicWeightedGraph g;
    g.d = d;
    g.num_vertices = 1;
    for (int i = 0; i < d; ++i) {
        std::array<long long, 3> s{};
        s[i] = 1;
        detail::add_sym(g, 0, 0, s, 1.0);
    }
    g.symmetric = true;
    g.validate();
    return g;
}

// Three-cheap-lines model on T^3: one ordinary grid vertex per cell plus one
// station per axis line. The lines are pairwise disjoint, carry weight
// epsilon per unit length, and sit at transverse distance 0.15 from the grid
// vertex (connector edges run at the ordinary unit rate). Ordinary grid
// edges keep weight 1. The stable-norm unit ball tends to the octahedron
// with vertices at +-e_i/epsilon.
inline PeriodicWeightedGraph hedlund_graph(double epsilon) {
    require(epsilon > 0.0 && epsilon < 0.5, "hedlund_graph: epsilon must be in (0, 0.5)");
    const double connector = 0.15;
    PeriodicWeightedGraph g;
    g.d = 3;
    g.num_vertices = 4;  // 0 = grid vertex, 1..3 = stations on the x/y/z lines
    for (int i = 0; i < 3; ++i) {
        std::array<long long, 3> s{};
        s[i] = 1;
        detail::add_sym(g, 0, 0, s, 1.0);              // ordinary grid edge
        detail::add_sym(g, 1 + i, 1 + i, s, epsilon);  // cheap line
        detail::add_sym(g, 0, 1 + i, {0, 0, 0}, connector);
    }
    g.symmetric = true;
    g.validate();
    return g;
}

}  // namespace mather::pgraph
