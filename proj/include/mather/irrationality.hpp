#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "mather/legendre.hpp"
#include "mather/util.hpp"

namespace mather {

enum class RelationSearch { Auto, Exhaustive, Reduction };

// Bounded search for the two relation groups of a homology class h:
//   Z-relations  { k in Z^b : <k,h> in Z }   (dimension drop of closure(Z h))
//   R-relations  { k in Z^b : <k,h> = 0 }    (dimension drop of closure(R h))
// I_Z = b - rank_Z, I_R = b - rank_R. A bounded search can only certify a
// lower bound on irrationality; the report carries the bound and mode used.
struct IrrationalityReport {
    HomologyVector h;
    long long search_bound = 0;
    int rank_Z = 0, rank_R = 0;
    int I_Z = 0, I_R = 0;
    RelationSearch mode_used = RelationSearch::Exhaustive;
    std::vector<std::vector<long long>> relations_Z, relations_R;  // basis-ish candidates found
};

namespace detail {

// Rank of an integer matrix via fraction-free (Bareiss) elimination.
inline int integer_rank(std::vector<std::vector<long long>> m) {
    if (m.empty()) return 0;
    using I = __int128;
    const int rows = static_cast<int>(m.size());
    const int cols = static_cast<int>(m[0].size());
    std::vector<std::vector<I>> a(rows, std::vector<I>(cols));
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) a[i][j] = m[i][j];
    int rank = 0;
    I prev = 1;
    for (int col = 0; col < cols && rank < rows; ++col) {
        int pivot = -1;
        for (int r = rank; r < rows; ++r)
            if (a[r][col] != 0) { pivot = r; break; }
        if (pivot < 0) continue;
        std::swap(a[rank], a[pivot]);
        for (int r = rank + 1; r < rows; ++r) {
            for (int c = col + 1; c < cols; ++c)
                a[r][c] = (a[rank][col] * a[r][c] - a[r][col] * a[rank][c]) / prev;
            a[r][col] = 0;
        }
        prev = a[rank][col];
        ++rank;
    }
    return rank;
}

inline bool near_integer(double v, double tol) { return std::fabs(v - std::round(v)) <= tol; }

// LLL reduction specialised to integer-relation lattices: rows are
// (k_1..k_b, m, C*(<k,h> + m*s)) with the integer part kept exact and the
// last coordinate recomputed from it, so size reductions never drift.
// s = 1 searches Z-relations (<k,h> close to an integer), s = 0 R-relations.
class RelationLLL {
public:
    RelationLLL(const std::vector<double>& h, bool with_integer_part, double scale)
        : h_(h), with_m_(with_integer_part), scale_(scale) {
        const int b = static_cast<int>(h.size());
        const int rows = b + (with_m_ ? 1 : 0);
        basis_.assign(rows, std::vector<long long>(b + (with_m_ ? 1 : 0), 0));
        for (int i = 0; i < b; ++i) basis_[i][i] = 1;
        if (with_m_) basis_[b][b] = 1;
    }

    std::vector<std::vector<long long>> reduced_rows() {
        lll();
        return basis_;
    }

    // Real embedding of an integer row.
    double residual(const std::vector<long long>& row) const {
        long double acc = 0.0L;
        const int b = static_cast<int>(h_.size());
        for (int i = 0; i < b; ++i) acc += static_cast<long double>(row[i]) * h_[i];
        if (with_m_) acc += static_cast<long double>(row[b]);
        return static_cast<double>(acc);
    }

private:
    std::vector<long double> embed(const std::vector<long long>& row) const {
        std::vector<long double> v(row.begin(), row.end());
        v.push_back(static_cast<long double>(scale_) * residual(row));
        return v;
    }

    void lll() {
        const int n = static_cast<int>(basis_.size());
        auto dot = [](const std::vector<long double>& a, const std::vector<long double>& b) {
            long double s = 0;
            for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
            return s;
        };
        // Gram-Schmidt data, recomputed from scratch on structural changes;
        // n <= 9 here, so the naive refresh is cheap.
        std::vector<std::vector<long double>> b_star;
        std::vector<std::vector<long double>> mu;
        std::vector<long double> norm2;
        auto refresh = [&] {
            std::vector<std::vector<long double>> emb(n);
            for (int i = 0; i < n; ++i) emb[i] = embed(basis_[i]);
            b_star.assign(n, {});
            mu.assign(n, std::vector<long double>(n, 0));
            norm2.assign(n, 0);
            for (int i = 0; i < n; ++i) {
                b_star[i] = emb[i];
                for (int j = 0; j < i; ++j) {
                    mu[i][j] = norm2[j] > 0 ? dot(emb[i], b_star[j]) / norm2[j] : 0;
                    for (std::size_t t = 0; t < b_star[i].size(); ++t)
                        b_star[i][t] -= mu[i][j] * b_star[j][t];
                }
                norm2[i] = dot(b_star[i], b_star[i]);
            }
        };
        refresh();
        const long double delta = 0.99L;
        int k = 1;
        int guard = 0;
        while (k < n && ++guard < 100000) {
            for (int j = k - 1; j >= 0; --j) {
                const long long r = static_cast<long long>(std::llroundl(mu[k][j]));
                if (r != 0) {
                    for (std::size_t t = 0; t < basis_[k].size(); ++t)
                        basis_[k][t] -= r * basis_[j][t];
                    refresh();
                }
            }
            if (norm2[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * norm2[k - 1]) {
                ++k;
            } else {
                std::swap(basis_[k], basis_[k - 1]);
                refresh();
                k = std::max(k - 1, 1);
            }
        }
    }

    std::vector<double> h_;
    bool with_m_;
    double scale_;
    std::vector<std::vector<long long>> basis_;
};

}  // namespace detail

// Bounded integer-relation search. Exhaustive enumeration when the candidate
// count fits the cost guard; LLL candidates otherwise (and for 4 < b <= 8).
inline IrrationalityReport irrationality(const HomologyVector& h, long long bound,
                                         RelationSearch mode = RelationSearch::Auto,
                                         double tol = 1e-9) {
    require(bound >= 1, "irrationality: bound must be >= 1");
    const int b = h.dim();
    require(b <= 8 || mode != RelationSearch::Exhaustive,
            "irrationality: b > 8 with exhaustive search requested");

    double cost = 1.0;
    for (int i = 0; i < b; ++i) cost *= 2.0 * static_cast<double>(bound) + 1.0;
    const bool exhaustive_ok = cost <= 2e8 && b <= 8;
    RelationSearch chosen = mode;
    if (mode == RelationSearch::Auto)
        chosen = (b <= 4 && exhaustive_ok) ? RelationSearch::Exhaustive : RelationSearch::Reduction;
    if (chosen == RelationSearch::Exhaustive)
        require(exhaustive_ok, "irrationality: exhaustive search too large for bound/dimension");

    IrrationalityReport rep{h, bound, 0, 0, 0, 0, chosen, {}, {}};

    auto consider = [&](const std::vector<long long>& k) {
        long double dotv = 0.0L;
        for (int i = 0; i < b; ++i) dotv += static_cast<long double>(k[i]) * h.coords[i];
        const double d = static_cast<double>(dotv);
        if (detail::near_integer(d, tol)) rep.relations_Z.push_back(k);
        if (std::fabs(d) <= tol) rep.relations_R.push_back(k);
    };

    if (chosen == RelationSearch::Exhaustive) {
        std::vector<long long> k(b, -bound);
        bool done = false;
        while (!done) {
            bool all_zero = true;
            for (long long v : k)
                if (v != 0) { all_zero = false; break; }
            if (!all_zero) consider(k);
            int i = 0;
            for (; i < b; ++i) {
                if (k[i] < bound) { ++k[i]; break; }
                k[i] = -bound;
            }
            done = (i == b);
        }
    } else {
        // Candidate relations from LLL-reduced bases of the two embedding
        // lattices, plus pairwise sums/differences of reduced rows.
        const double scale = 1.0 / tol;
        for (bool with_m : {true, false}) {
            detail::RelationLLL lll(h.coords, with_m, scale);
            auto rows = lll.reduced_rows();
            std::vector<std::vector<long long>> cand = rows;
            for (std::size_t i = 0; i < rows.size(); ++i)
                for (std::size_t j = i + 1; j < rows.size(); ++j) {
                    std::vector<long long> sum = rows[i], diff = rows[i];
                    for (std::size_t t = 0; t < sum.size(); ++t) {
                        sum[t] += rows[j][t];
                        diff[t] -= rows[j][t];
                    }
                    cand.push_back(sum);
                    cand.push_back(diff);
                }
            for (const auto& row : cand) {
                std::vector<long long> k(row.begin(), row.begin() + b);
                long long mx = 0;
                bool zero = true;
                for (long long v : k) {
                    mx = std::max(mx, v < 0 ? -v : v);
                    if (v != 0) zero = false;
                }
                if (zero || mx > bound) continue;
                consider(k);
            }
        }
    }

    rep.rank_Z = detail::integer_rank(rep.relations_Z);
    rep.rank_R = detail::integer_rank(rep.relations_R);
    rep.I_Z = b - rep.rank_Z;
    rep.I_R = b - rep.rank_R;
    return rep;
}

}  // namespace mather
