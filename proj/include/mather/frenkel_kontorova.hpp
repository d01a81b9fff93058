#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "mather/convex_profile.hpp"
#include "mather/legendre.hpp"
#include "mather/util.hpp"

namespace mather::fk {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Fraction {
    long long p = 0;  // winding
    long long q = 1;  // period, > 0, gcd(|p|,q) = 1 after reduce()

    static Fraction reduced(long long p, long long q) {
        require(q != 0, "fraction: zero denominator");
        if (q < 0) { p = -p; q = -q; }
        const long long g = gcd_ll(p, q);
        return Fraction{g ? p / g : 0, g ? q / g : 1};
    }
    double value() const { return static_cast<double>(p) / static_cast<double>(q); }
    bool operator<(const Fraction& o) const { return p * o.q < o.p * q; }
    bool operator==(const Fraction& o) const { return p == o.p && q == o.q; }
};

// All reduced fractions p/q with q <= Q and |p/q| <= max_abs, ascending.
inline std::vector<Fraction> farey_fractions(int Q, double max_abs = 2.0) {
    require(Q >= 1, "farey: Q must be >= 1");
    std::vector<Fraction> out;
    for (long long q = 1; q <= Q; ++q) {
        const long long pmax = static_cast<long long>(std::floor(max_abs * static_cast<double>(q) + 1e-12));
        for (long long p = -pmax; p <= pmax; ++p) {
            if (gcd_ll(p, q) != 1) continue;
            out.push_back(Fraction{p, q});
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// 1-periodic on-site potential: either the standard cosine family
// V(x) = K/(2 pi)^2 * (1 - cos 2 pi x) or a sampled table with linear
// interpolation over [0,1).
class Potential {
public:
    static Potential cosine(double K) {
        require(K >= 0.0, "potential: K must be >= 0");
        Potential p;
        p.K_ = K;
        return p;
    }
    static Potential table(std::vector<double> values) {
        require(values.size() >= 2, "potential: table needs >= 2 samples");
        Potential p;
        p.table_ = std::move(values);
        return p;
    }

    bool is_cosine() const { return table_.empty(); }
    double K() const { return K_; }

    double V(double x) const {
        if (is_cosine()) return K_ / (kTwoPi * kTwoPi) * (1.0 - std::cos(kTwoPi * x));
        const double f = mod1(x) * static_cast<double>(table_.size());
        const std::size_t i = std::min(static_cast<std::size_t>(f), table_.size() - 1);
        const double t = f - static_cast<double>(i);
        const double v0 = table_[i];
        const double v1 = table_[(i + 1) % table_.size()];
        return v0 + t * (v1 - v0);
    }
    double dV(double x) const {
        if (is_cosine()) return K_ / kTwoPi * std::sin(kTwoPi * x);
        const double f = mod1(x) * static_cast<double>(table_.size());
        const std::size_t i = std::min(static_cast<std::size_t>(f), table_.size() - 1);
        return (table_[(i + 1) % table_.size()] - table_[i]) * static_cast<double>(table_.size());
    }
    double d2V(double x) const {
        if (is_cosine()) return K_ * std::cos(kTwoPi * x);
        return 0.0;  // piecewise-linear table
    }

private:
    double K_ = 0.0;
    std::vector<double> table_;
};

// Discrete one-degree-of-freedom action model: bond action
// h(x, x') = (x'-x)^2/2 + V(x), with h(x+1, x'+1) = h(x, x') and twist
// d2h/dx dx' = -1 built into the quadratic bond.
struct GeneratingFunction {
    Potential potential = Potential::cosine(0.0);

    double bond(double x, double xn) const {
        const double d = xn - x;
        return 0.5 * d * d + potential.V(x);
    }
    std::string label() const {
        return potential.is_cosine() ? "fk:K=" + fmt_g(potential.K()) : "fk:table";
    }
};

// One period of a configuration x_{i+q} = x_i + p.
struct PeriodicConfiguration {
    long long p = 0;
    long long q = 1;
    std::vector<double> positions;   // x_0 .. x_{q-1}
    double average_action = 0.0;
    bool converged = false;
    double grad_norm = 0.0;          // max-norm of the action gradient at return
    long long iterations = 0;
};

namespace detail {

inline double action(const GeneratingFunction& gf, long long p, const std::vector<double>& x) {
    const std::size_t q = x.size();
    double w = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
        const double xn = (i + 1 < q) ? x[i + 1] : x[0] + static_cast<double>(p);
        w += gf.bond(x[i], xn);
    }
    return w;
}

inline void gradient(const GeneratingFunction& gf, long long p, const std::vector<double>& x,
                     std::vector<double>& g) {
    const std::size_t q = x.size();
    g.assign(q, 0.0);
    for (std::size_t i = 0; i < q; ++i) {
        const double xp = (i > 0) ? x[i - 1] : x[q - 1] - static_cast<double>(p);
        const double xn = (i + 1 < q) ? x[i + 1] : x[0] + static_cast<double>(p);
        g[i] = 2.0 * x[i] - xp - xn + gf.potential.dV(x[i]);
    }
}

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

// Dense (H + lambda I) s = -g solve; H is the periodic tridiagonal action
// Hessian. q stays small here, Gaussian elimination is plenty.
inline bool newton_step(const GeneratingFunction& gf, long long /*p*/, const std::vector<double>& x,
                        const std::vector<double>& g, double lambda, std::vector<double>& step) {
    const int q = static_cast<int>(x.size());
    std::vector<std::vector<double>> a(q, std::vector<double>(q + 1, 0.0));
    for (int i = 0; i < q; ++i) {
        a[i][i] += 2.0 + gf.potential.d2V(x[i]) + lambda;
        a[i][(i + 1) % q] += -1.0;
        a[i][(i - 1 + q) % q] += -1.0;
        a[i][q] = -g[i];
    }
    for (int col = 0; col < q; ++col) {
        int piv = col;
        for (int r = col + 1; r < q; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        if (std::fabs(a[piv][col]) < 1e-14) return false;
        std::swap(a[col], a[piv]);
        for (int r = col + 1; r < q; ++r) {
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (int c = col; c <= q; ++c) a[r][c] -= f * a[col][c];
        }
    }
    step.assign(q, 0.0);
    for (int r = q - 1; r >= 0; --r) {
        double s = a[r][q];
        for (int c = r + 1; c < q; ++c) s -= a[r][c] * step[c];
        step[r] = s / a[r][r];
    }
    return true;
}

// Gradient descent with Armijo backtracking, then damped-Newton polishing.
inline PeriodicConfiguration minimize_from(const GeneratingFunction& gf, long long p,
                                           std::vector<double> x, double gtol, long long max_iters) {
    const std::size_t q = x.size();
    std::vector<double> g, step, trial;
    gradient(gf, p, x, g);
    double w = action(gf, p, x);
    long long it = 0;

    // Warmup: a few descent steps tame far-from-quadratic starts.
    for (int k = 0; k < 25 && max_abs(g) > gtol && it < max_iters; ++k, ++it) {
        double t = 0.25;
        const double g2 = std::inner_product(g.begin(), g.end(), g.begin(), 0.0);
        trial = x;
        for (int bt = 0; bt < 60; ++bt) {
            for (std::size_t i = 0; i < q; ++i) trial[i] = x[i] - t * g[i];
            if (action(gf, p, trial) <= w - 1e-4 * t * g2) break;
            t *= 0.5;
        }
        x = trial;
        w = action(gf, p, x);
        gradient(gf, p, x, g);
    }

    double lambda = 1e-8;
    while (max_abs(g) > gtol && it < max_iters) {
        ++it;
        if (!newton_step(gf, p, x, g, lambda, step)) {
            lambda = std::max(lambda * 10.0, 1e-6);
            continue;
        }
        trial = x;
        for (std::size_t i = 0; i < q; ++i) trial[i] += step[i];
        const double wt = action(gf, p, trial);
        if (wt <= w + 1e-15 * std::fabs(w)) {
            x = trial;
            w = wt;
            gradient(gf, p, x, g);
            lambda = std::max(lambda / 4.0, 1e-12);
        } else {
            lambda *= 10.0;
            if (lambda > 1e10) break;  // stuck; report best iterate
        }
    }

    PeriodicConfiguration cfg;
    cfg.p = p;
    cfg.q = static_cast<long long>(q);
    cfg.positions = std::move(x);
    cfg.average_action = w / static_cast<double>(q);
    cfg.grad_norm = max_abs(g);
    cfg.converged = cfg.grad_norm <= gtol;
    cfg.iterations = it;
    return cfg;
}

}  // namespace detail

// Best local minimizer of the q-site action under x_q = x_0 + p, from the
// rigid-rotation start x_i = i p/q plus `restarts` seeded random starts.
inline PeriodicConfiguration minimize_periodic(const GeneratingFunction& gf, long long p, long long q,
                                               int restarts = 8, std::uint64_t seed = 1,
                                               double gtol = 1e-10, long long max_iters = 100000) {
    require(q >= 1, "minimize_periodic: q must be >= 1");
    require(gcd_ll(p, q) == 1, "minimize_periodic: p/q must be reduced");
    require(restarts >= 1, "minimize_periodic: restarts must be >= 1");

    std::mt19937_64 rng(seed);
    auto uniform = [&rng](double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
    };

    PeriodicConfiguration best;
    bool have = false;
    for (int r = 0; r <= restarts; ++r) {
        std::vector<double> x(static_cast<std::size_t>(q));
        const double offset = (r == 0) ? 0.0 : uniform(0.0, 1.0);
        for (long long i = 0; i < q; ++i) {
            x[static_cast<std::size_t>(i)] =
                static_cast<double>(i) * static_cast<double>(p) / static_cast<double>(q) + offset +
                ((r == 0) ? 0.0 : uniform(-0.3, 0.3));
        }
        auto cfg = detail::minimize_from(gf, p, std::move(x), gtol, max_iters);
        bool better = !have;
        if (have && cfg.converged != best.converged)
            better = cfg.converged;
        else if (have)
            better = cfg.average_action < best.average_action;
        if (better) {
            best = std::move(cfg);
            have = true;
        }
    }
    return best;
}

// True when the projections x_i mod 1 are cyclically ordered like the rigid
// rotation by p/q (the discrete graph-theorem trace for minimizers).
inline bool cyclically_ordered(const PeriodicConfiguration& cfg) {
    const long long q = cfg.q;
    if (q <= 2) return true;
    std::vector<int> idx(static_cast<std::size_t>(q));
    for (long long i = 0; i < q; ++i) idx[static_cast<std::size_t>(i)] = static_cast<int>(i);
    std::vector<double> f(static_cast<std::size_t>(q));
    for (long long i = 0; i < q; ++i) f[static_cast<std::size_t>(i)] = mod1(cfg.positions[static_cast<std::size_t>(i)]);
    std::stable_sort(idx.begin(), idx.end(), [&f](int a, int b) { return f[a] < f[b]; });
    // Along the sorted circle, the rotation ranks i*p mod q must advance by 1.
    auto rank = [&](int i) {
        long long r = (static_cast<long long>(i) * cfg.p) % q;
        return static_cast<long long>((r + q) % q);
    };
    const long long r0 = rank(idx[0]);
    for (long long j = 1; j < q; ++j)
        if (rank(idx[static_cast<std::size_t>(j)]) != (r0 + j) % q) return false;
    return true;
}

// beta(p/q) over all reduced fractions |p/q| <= 2 with q <= Q.
struct BetaProfile {
    std::vector<std::pair<Fraction, double>> entries;  // ascending by value
    GeneratingFunction gf;
    int Q = 0;
    int restarts = 0;
    std::uint64_t seed = 0;

    double at(const Fraction& f) const {
        for (const auto& [fr, v] : entries)
            if (fr == f) return v;
        fail("beta profile: fraction %lld/%lld not present", f.p, f.q);
    }

    SampledConvexProfile to_convex_profile(double tol_convex = 1e-8) const {
        std::vector<Sample> s;
        s.reserve(entries.size());
        for (const auto& [fr, v] : entries) s.push_back({fr.value(), v});
        return SampledConvexProfile(std::move(s), gf.label() + ",Q=" + std::to_string(Q), tol_convex);
    }
    std::vector<std::string> fraction_labels() const {
        std::vector<std::string> c;
        c.reserve(entries.size());
        for (const auto& [fr, v] : entries)
            c.push_back(std::to_string(fr.p) + "/" + std::to_string(fr.q));
        return c;
    }
};

inline BetaProfile beta_profile(const GeneratingFunction& gf, int Q, int restarts = 8,
                                std::uint64_t seed = 1, double tol_convex = 1e-8) {
    require(Q >= 2, "beta_profile: Q must be >= 2");
    BetaProfile prof;
    prof.gf = gf;
    prof.Q = Q;
    prof.restarts = restarts;
    prof.seed = seed;
    for (const auto& fr : farey_fractions(Q, 2.0)) {
        // Per-fraction seed: deterministic and independent of evaluation order.
        const std::uint64_t s = seed * 1000003ull +
                                static_cast<std::uint64_t>(fr.p + 4096) * 131ull +
                                static_cast<std::uint64_t>(fr.q);
        auto cfg = minimize_periodic(gf, fr.p, fr.q, restarts, s);
        if (!cfg.converged)
            fail("beta_profile: minimize_periodic failed at %lld/%lld (residual %.3e)",
                 fr.p, fr.q, cfg.grad_norm);
        prof.entries.emplace_back(fr, cfg.average_action);
    }
    std::sort(prof.entries.begin(), prof.entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    // Certificate: reject silently non-minimal branches early.
    (void)prof.to_convex_profile(tol_convex);
    return prof;
}

namespace detail {
// One-sided derivative from the two nearest neighbors, linearly extrapolated
// to zero spacing. Exact for quadratics, which is what makes the integrable
// case read as corner-free at machine precision.
inline double extrapolated_slope(double f0, double f1, double h1, double f2, double h2) {
    const double dq1 = (f1 - f0) / h1;
    const double dq2 = (f2 - f0) / h2;
    return (dq1 * h2 - dq2 * h1) / (h2 - h1);
}
}  // namespace detail

// Corner gap of beta at a sampled fraction: extrapolated right derivative
// minus extrapolated left derivative, clamped at 0. Needs two Farey
// neighbors on each side.
inline double corner_gap(const BetaProfile& profile, const Fraction& at) {
    const auto& e = profile.entries;
    int i = -1;
    for (std::size_t k = 0; k < e.size(); ++k)
        if (e[k].first == at) { i = static_cast<int>(k); break; }
    require(i >= 0, "corner_gap: fraction not in profile");
    require(i >= 2 && i + 2 < static_cast<int>(e.size()),
            "corner_gap: needs two Farey neighbors on each side");
    const double x0 = e[i].first.value(), f0 = e[i].second;
    const double right = detail::extrapolated_slope(
        f0, e[i + 1].second, e[i + 1].first.value() - x0, e[i + 2].second, e[i + 2].first.value() - x0);
    const double left = -detail::extrapolated_slope(
        f0, e[i - 1].second, x0 - e[i - 1].first.value(), e[i - 2].second, x0 - e[i - 2].first.value());
    return std::max(0.0, right - left);
}

inline SampledConvexProfile alpha_from_beta(const BetaProfile& profile,
                                            const std::vector<double>& dual_grid,
                                            double tol_convex = 1e-8) {
    return legendre_transform(profile.to_convex_profile(tol_convex), dual_grid, tol_convex);
}

}  // namespace mather::fk
