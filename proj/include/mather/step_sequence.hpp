#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mather/irrationality.hpp"
#include "mather/util.hpp"

namespace mather::torus {

// (alpha, beta) with 1, alpha, beta rationally independent as far as a
// bounded integer-relation search can tell. True independence is not
// decidable from floats; the bound and the check outcome are recorded.
struct IrrationalPair {
    double alpha = 0.0;
    double beta = 0.0;
    long long independence_checked_to = 0;
    bool independent = false;  // no relation found up to the bound
};

namespace detail {
inline IrrationalPair checked_pair(double alpha, double beta, long long bound, double tol) {
    require(std::isfinite(alpha) && std::isfinite(beta), "irrational pair: non-finite entry");
    require(bound >= 1000, "irrational pair: independence bound must be >= 1e3");
    // k1*alpha + k2*beta in Z covers k0 + k1*alpha + k2*beta = 0.
    auto rep = irrationality(HomologyVector({alpha, beta}), bound, RelationSearch::Exhaustive, tol);
    return IrrationalPair{alpha, beta, bound, rep.I_Z == 2};
}
}  // namespace detail

inline IrrationalPair make_irrational_pair(double alpha, double beta, long long bound = 1000,
                                           double tol = 1e-9) {
    auto pair = detail::checked_pair(alpha, beta, bound, tol);
    if (!pair.independent)
        fail("irrational pair: integer relation among 1, alpha, beta found within bound %lld", bound);
    return pair;
}

// Performs and records the independence check but does not reject; for
// constructions whose own preconditions do not need irrationality (the
// interval-avoiding walk works for any 0 < alpha < beta < 0.1).
inline IrrationalPair make_pair_lenient(double alpha, double beta, long long bound = 1000,
                                        double tol = 1e-9) {
    return detail::checked_pair(alpha, beta, bound, tol);
}

enum class Step : std::uint8_t { Right, Up, Left, Down };  // +(1,0) +(0,1) -(1,0) -(0,1)

inline int step_dx(Step s) { return s == Step::Right ? 1 : (s == Step::Left ? -1 : 0); }
inline int step_dy(Step s) { return s == Step::Up ? 1 : (s == Step::Down ? -1 : 0); }

// Lattice walk with unit steps.
struct StepSequence {
    std::vector<Step> steps;
    long long x0 = 0, y0 = 0;

    std::vector<std::pair<long long, long long>> positions() const {
        std::vector<std::pair<long long, long long>> pos;
        pos.reserve(steps.size() + 1);
        long long x = x0, y = y0;
        pos.emplace_back(x, y);
        for (Step s : steps) {
            x += step_dx(s);
            y += step_dy(s);
            pos.emplace_back(x, y);
        }
        return pos;
    }
};

// Heights (alpha x_n + beta y_n) mod 1 at every visited position, origin
// included. Compensated accumulation, one reduction per sample.
struct HeightTrace {
    std::vector<double> values;  // in [0,1)
};

inline HeightTrace heights(const StepSequence& seq, const IrrationalPair& pair) {
    HeightTrace trace;
    trace.values.reserve(seq.steps.size() + 1);
    KahanSum s;
    s.add(pair.alpha * static_cast<double>(seq.x0));
    s.add(pair.beta * static_cast<double>(seq.y0));
    trace.values.push_back(mod1(s.value()));
    for (Step st : seq.steps) {
        const int dx = step_dx(st), dy = step_dy(st);
        if (dx) s.add(dx * pair.alpha);
        if (dy) s.add(dy * pair.beta);
        trace.values.push_back(mod1(s.value()));
    }
    return trace;
}

struct CoverageReport {
    std::size_t n = 0;
    double resolution = 0.0;       // bin half-width delta
    double covered_measure = 0.0;  // fraction of the domain within delta of a sample
    double largest_gap = 0.0;      // largest empty (circular) arc
    double lo = 0.0, hi = 1.0;     // domain; [0,1) circular by default
    bool circular = true;
};

// Sorts the heights circularly and measures the largest empty arc and the
// delta-covered fraction of the circle.
inline CoverageReport gap_analysis(const HeightTrace& trace, double delta) {
    require(!trace.values.empty(), "gap_analysis: empty trace");
    require(delta > 0.0 && delta < 0.5, "gap_analysis: delta must be in (0, 0.5)");
    std::vector<double> v = trace.values;
    std::sort(v.begin(), v.end());
    CoverageReport rep;
    rep.n = v.size();
    rep.resolution = delta;
    double covered_loss = 0.0;
    double largest = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double gap = (i + 1 < v.size()) ? v[i + 1] - v[i] : (1.0 - v.back()) + v.front();
        largest = std::max(largest, gap);
        covered_loss += std::max(0.0, gap - 2.0 * delta);
    }
    rep.largest_gap = largest;
    rep.covered_measure = std::min(1.0, std::max(0.0, 1.0 - covered_loss));
    return rep;
}

// Interval-avoiding walk: step +(0,1) until the height lands in ]-beta,0[
// mod 1; the ]-beta,-alpha[ branch plays the scripted block
// +(1,0) +(0,1) +(0,1) -(1,0), the ]-alpha,0[ branch a plain +(0,1). Every
// height then avoids ]0, A[ with A = min{alpha, beta - alpha}, and x_n stays
// in {0, 1}.
inline StepSequence avoid_interval_sequence(const IrrationalPair& pair, std::size_t n) {
    require(0.0 < pair.alpha && pair.alpha < pair.beta && pair.beta < 0.1,
            "avoid_interval_sequence: needs 0 < alpha < beta < 0.1");
    require(n >= 1, "avoid_interval_sequence: n must be >= 1");
    StepSequence seq;
    seq.steps.reserve(n + 4);
    KahanSum s;
    auto h = [&] { return mod1(s.value()); };
    auto emit = [&](Step st) {
        seq.steps.push_back(st);
        const int dx = step_dx(st), dy = step_dy(st);
        if (dx) s.add(dx * pair.alpha);
        if (dy) s.add(dy * pair.beta);
    };
    while (seq.steps.size() < n) {
        const double cur = h();
        if (cur > 1.0 - pair.beta && cur < 1.0 - pair.alpha) {
            emit(Step::Right);
            emit(Step::Up);
            emit(Step::Up);
            emit(Step::Left);
        } else {
            emit(Step::Up);
        }
    }
    seq.steps.resize(n);
    return seq;
}

// i.i.d. +(1,0) with probability p_right, else +(0,1); bit-reproducible for
// a given seed (no distribution adapters).
inline StepSequence random_sequence(double p_right, std::size_t n, std::uint64_t seed) {
    require(p_right >= 0.0 && p_right <= 1.0, "random_sequence: p_right must be in [0,1]");
    StepSequence seq;
    seq.steps.reserve(n);
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        seq.steps.push_back(u < p_right ? Step::Right : Step::Up);
    }
    return seq;
}

// Two-letter substitution, e.g. the Fibonacci one 0 -> 1, 1 -> 01.
struct SubstitutionRules {
    std::string image0;
    std::string image1;
};

inline SubstitutionRules fibonacci_rules() { return {"1", "01"}; }

namespace detail {
inline bool primitive(const SubstitutionRules& r) {
    // Substitution matrix powers must become strictly positive.
    long long m[2][2] = {{0, 0}, {0, 0}};
    for (char c : r.image0) (c == '0' ? m[0][0] : m[1][0]) += 1;
    for (char c : r.image1) (c == '0' ? m[0][1] : m[1][1]) += 1;
    long long p[2][2] = {{m[0][0], m[0][1]}, {m[1][0], m[1][1]}};
    for (int k = 1; k < 4; ++k) {
        if (p[0][0] > 0 && p[0][1] > 0 && p[1][0] > 0 && p[1][1] > 0) return true;
        long long q[2][2];
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                q[i][j] = p[i][0] * m[0][j] + p[i][1] * m[1][j];
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) p[i][j] = std::min(q[i][j], 1000000ll);
    }
    return p[0][0] > 0 && p[0][1] > 0 && p[1][0] > 0 && p[1][1] > 0;
}
}  // namespace detail

inline std::string substitution_word(const SubstitutionRules& rules, const std::string& seed_word,
                                     std::size_t n) {
    require(!rules.image0.empty() && !rules.image1.empty(), "substitution: empty image");
    for (char c : rules.image0 + rules.image1 + seed_word)
        require(c == '0' || c == '1', "substitution: alphabet is {0,1}");
    require(!seed_word.empty(), "substitution: empty seed word");
    require(detail::primitive(rules), "substitution: rules not primitive");
    require(rules.image0.size() + rules.image1.size() >= 3, "substitution: rules not expanding");
    std::string w = seed_word;
    int guard = 0;
    while (w.size() < n) {
        require(++guard <= 128, "substitution: word does not grow");
        std::string next;
        next.reserve(w.size() * 2);
        for (char c : w) next += (c == '0' ? rules.image0 : rules.image1);
        w.swap(next);
    }
    w.resize(n);
    return w;
}

// Letter 0 -> +(1,0) (adds alpha), letter 1 -> +(0,1) (adds beta).
inline StepSequence word_to_sequence(const std::string& word) {
    StepSequence seq;
    seq.steps.reserve(word.size());
    for (char c : word) seq.steps.push_back(c == '0' ? Step::Right : Step::Up);
    return seq;
}

inline StepSequence substitution_sequence(const SubstitutionRules& rules, const std::string& seed_word,
                                          std::size_t n) {
    require(n >= 1, "substitution_sequence: n must be >= 1");
    return word_to_sequence(substitution_word(rules, seed_word, n));
}

// All binary words in length-then-lexicographic order, concatenated:
// 0 1 00 01 10 11 000 ...
inline std::string all_words_word(std::size_t n) {
    std::string w;
    w.reserve(n);
    for (int len = 1; w.size() < n && len < 64; ++len) {
        const std::uint64_t count = 1ull << len;
        for (std::uint64_t v = 0; v < count && w.size() < n; ++v)
            for (int bit = len - 1; bit >= 0 && w.size() < n; --bit)
                w += ((v >> bit) & 1u) ? '1' : '0';
    }
    return w;
}

inline StepSequence all_words_sequence(std::size_t n) {
    require(n >= 1, "all_words_sequence: n must be >= 1");
    return word_to_sequence(all_words_word(n));
}

}  // namespace mather::torus
