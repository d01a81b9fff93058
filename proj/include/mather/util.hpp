#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace mather {

// Single error type for precondition / certificate rejections. The message
// carries the offending data (violating triple, offending fraction, ...).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <typename... Args>
[[noreturn]] inline void fail(const char* fmt, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), fmt, args...);
    throw Error(buf);
}

inline void require(bool ok, const std::string& what) {
    if (!ok) throw Error(what);
}

// Kahan-compensated accumulator. Heights of long walks are sums of 1e7
// increments; plain doubles drift by ~n*eps*|sum|, this keeps it O(eps*|sum|).
class KahanSum {
public:
    void add(double x) {
        const double y = x - comp_;
        const double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }
    void reset(double v = 0.0) { sum_ = v; comp_ = 0.0; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Reduce to [0,1). fmod keeps the sign of the argument, hence the fixup.
inline double mod1(double x) {
    double r = x - std::floor(x);
    if (r >= 1.0) r -= 1.0;   // floor rounding at the seam
    if (r < 0.0) r += 1.0;
    return r;
}

inline long long gcd_ll(long long a, long long b) {
    return std::gcd(a < 0 ? -a : a, b < 0 ? -b : b);
}

// FNV-1a 64-bit, used for output-file content hashes in run manifests.
inline std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// 15 significant digits, enough for the >= 12 the profile format requires
// while staying stable across repeated parse/serialize round trips.
inline std::string fmt_g(double v, int digits = 15) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
    require(n >= 2, "linspace: need at least 2 points");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
    return g;
}

}  // namespace mather
