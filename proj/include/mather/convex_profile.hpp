#pragma once

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mather/util.hpp"

namespace mather {

// Default numeric tolerances. The sources give none; these are configurable
// everywhere they are used.
struct Tolerances {
    double convex = 1e-9;   // midpoint-convexity slack
    double face = 1e-7;     // max deviation from an affine fit inside a face
    double corner = 1e-4;   // minimal slope jump that counts as a vertex
    double dual = 1e-6;     // |min alpha + beta(0)| duality identity slack
};

struct Sample {
    double x;      // abscissa (homology coordinate along the sampled line)
    double value;  // action units
};

struct ConvexityViolation {
    int index;  // interior sample that pokes above the chord
    Sample left, mid, right;
    double excess;  // value - chord, > tol
};

// A convex function of one real variable known at finitely many points.
// Abscissae are strictly increasing; discrete convexity is certified at
// construction. Immutable afterwards, safe to share across threads.
class SampledConvexProfile {
public:
    SampledConvexProfile(std::vector<Sample> samples, std::string provenance,
                         double tol_convex = Tolerances{}.convex)
        : samples_(std::move(samples)), provenance_(std::move(provenance)) {
        require(!samples_.empty(), "profile: no samples");
        for (std::size_t i = 0; i + 1 < samples_.size(); ++i)
            require(samples_[i].x < samples_[i + 1].x, "profile: abscissae not strictly increasing");
        if (auto v = violation(tol_convex)) {
            fail("profile: convexity certificate failed at sample %d: "
                 "(%.17g,%.17g) (%.17g,%.17g) (%.17g,%.17g), excess %.3e",
                 v->index, v->left.x, v->left.value, v->mid.x, v->mid.value,
                 v->right.x, v->right.value, v->excess);
        }
    }

    const std::vector<Sample>& samples() const { return samples_; }
    const std::string& provenance() const { return provenance_; }
    int size() const { return static_cast<int>(samples_.size()); }
    double x(int i) const { return samples_[i].x; }
    double value(int i) const { return samples_[i].value; }

    // First interior sample lying above the chord of its neighbors by more
    // than tol, if any.
    std::optional<ConvexityViolation> violation(double tol) const {
        return check_convexity(samples_, tol);
    }

    static std::optional<ConvexityViolation> check_convexity(const std::vector<Sample>& s, double tol) {
        for (std::size_t i = 1; i + 1 < s.size(); ++i) {
            const double span = s[i + 1].x - s[i - 1].x;
            const double chord =
                (s[i - 1].value * (s[i + 1].x - s[i].x) + s[i + 1].value * (s[i].x - s[i - 1].x)) / span;
            const double excess = s[i].value - chord;
            if (excess > tol)
                return ConvexityViolation{static_cast<int>(i), s[i - 1], s[i], s[i + 1], excess};
        }
        return std::nullopt;
    }

    // Index of the sample whose abscissa matches `at` within eps, or -1.
    int find_abscissa(double at, double eps = 1e-12) const {
        auto it = std::lower_bound(samples_.begin(), samples_.end(), at - eps,
                                   [](const Sample& s, double v) { return s.x < v; });
        if (it != samples_.end() && std::fabs(it->x - at) <= eps)
            return static_cast<int>(it - samples_.begin());
        return -1;
    }

    // Columnar text format:
    //   # profile v1 dim=1 provenance=<label>
    //   <abscissa>\t<value>[\t# <comment>]
    std::string serialize(const std::vector<std::string>* row_comments = nullptr) const {
        std::ostringstream os;
        os << "# profile v1 dim=1 provenance=" << provenance_ << "\n";
        for (std::size_t i = 0; i < samples_.size(); ++i) {
            os << fmt_g(samples_[i].x) << "\t" << fmt_g(samples_[i].value);
            if (row_comments && i < row_comments->size() && !(*row_comments)[i].empty())
                os << "\t# " << (*row_comments)[i];
            os << "\n";
        }
        return os.str();
    }

    static SampledConvexProfile parse(std::istream& in, double tol_convex = Tolerances{}.convex) {
        std::string line;
        require(static_cast<bool>(std::getline(in, line)), "profile: empty input");
        const std::string magic = "# profile v1 dim=1 provenance=";
        require(line.rfind(magic, 0) == 0, "profile: bad header: " + line);
        std::string prov = line.substr(magic.size());
        std::vector<Sample> samples;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            if (auto pos = line.find('#'); pos != std::string::npos) line.resize(pos);
            std::istringstream row(line);
            Sample s{};
            if (row >> s.x >> s.value) samples.push_back(s);
        }
        return SampledConvexProfile(std::move(samples), std::move(prov), tol_convex);
    }

    static SampledConvexProfile load(const std::string& path, double tol_convex = Tolerances{}.convex) {
        std::ifstream in(path);
        require(static_cast<bool>(in), "profile: cannot open " + path);
        return parse(in, tol_convex);
    }

private:
    std::vector<Sample> samples_;
    std::string provenance_;
};

}  // namespace mather
