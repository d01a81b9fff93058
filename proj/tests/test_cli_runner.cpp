#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "mather/experiment.hpp"

using namespace mather;
using namespace mather::lab;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "mather_lab_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(static_cast<bool>(in));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::pair<std::string, std::string>> file_hashes(const RunManifest& m) { return m.files; }

}  // namespace

TEST_SUITE("cli-runner") {

TEST_CASE("config parsing accepts the documented format") {
    const std::string text =
        "# comment\n"
        "engine = beta-fk\n"
        "seed = 42\n"
        "out = runs/k0\n"
        "[beta-fk]\n"
        "K = 0\n"
        "Q = 6\n";
    auto cfg = parse_config_text(text, "mem");
    CHECK(cfg.engine == "beta-fk");
    CHECK(cfg.seed == 42);
    CHECK(cfg.has_seed);
    CHECK(cfg.out == "runs/k0");
    CHECK(cfg.params.at("K") == "0");
    CHECK(cfg.params.at("Q") == "6");
}

TEST_CASE("config rejections: unknown keys, mismatched section, missing fields") {
    CHECK_THROWS_AS(parse_config_text("engine = beta-fk\nout = o\nbogus = 1\n"), Error);
    CHECK_THROWS_AS(parse_config_text("engine = beta-fk\nout = o\n[torus-seq]\nn = 5\n"), Error);
    CHECK_THROWS_AS(parse_config_text("out = o\n"), Error);
    CHECK_THROWS_AS(parse_config_text("engine = beta-fk\n"), Error);
    CHECK_THROWS_AS(parse_config_text("engine = beta-fk\nout = o\n[beta-fk]\nK = 1\nK = 2\n"), Error);
    // Unknown engine-section key is rejected at dispatch.
    auto cfg = parse_config_text("engine = beta-fk\nseed = 1\nout = o\n[beta-fk]\nK = 0\nQ = 4\nwat = 1\n");
    auto man = run(cfg, fresh_dir("badkey").string());
    CHECK(man.status == "fail");
    CHECK(man.error.find("unknown key") != std::string::npos);
}

TEST_CASE("beta-fk run: integrable profile entries equal the half-square") {
    const auto root = fresh_dir("betafk");
    auto cfg = parse_config_text(
        "engine = beta-fk\nseed = 7\nout = k0\n[beta-fk]\nK = 0\nQ = 8\nrestarts = 3\n");
    auto man = run(cfg, root.string());
    REQUIRE(man.passed());
    auto prof = SampledConvexProfile::load((root / "k0" / "beta.txt").string());
    for (int i = 0; i < prof.size(); ++i) {
        const double rho = prof.x(i);
        CHECK(std::fabs(prof.value(i) - 0.5 * rho * rho) <= 1e-9);
    }
    // Manifest exists, mentions every output, and carries pass checks.
    const auto manifest = read_file(root / "k0" / "manifest.txt");
    CHECK(manifest.find("status = pass") != std::string::npos);
    CHECK(manifest.find("file beta.txt fnv:") != std::string::npos);
    CHECK(manifest.find("check convexity_certificate pass") != std::string::npos);
    CHECK(manifest.find("check duality_identity pass") != std::string::npos);
}

TEST_CASE("torus-seq avoid run reports the expected gap") {
    const auto root = fresh_dir("avoid");
    auto cfg = parse_config_text(
        "engine = torus-seq\nout = a\n[torus-seq]\nkind = avoid\nalpha = 0.07\nbeta = 0.09\nn = 100000\n");
    auto man = run(cfg, root.string());
    REQUIRE(man.passed());
    const auto cov = read_file(root / "a" / "coverage.txt");
    const auto pos = cov.find("largest_gap = ");
    REQUIRE(pos != std::string::npos);
    const double gap = std::stod(cov.substr(pos + 14));
    CHECK(gap >= 0.02 - 1e-9);
    bool found_check = false;
    for (const auto& [name, ok] : man.checks)
        if (name == "avoid_interval_soundness") {
            found_check = true;
            CHECK(ok);
        }
    CHECK(found_check);
}

TEST_CASE("identical configs reproduce identical output hashes") {
    const auto root1 = fresh_dir("det1");
    const auto root2 = fresh_dir("det2");
    const std::string text =
        "engine = torus-seq\nseed = 5\nout = r\n[torus-seq]\nkind = random\nalpha = "
        "0.41421356237309515\nbeta = 0.7320508075688772\nn = 20000\np_right = 0.4\n";
    auto m1 = run(parse_config_text(text), root1.string());
    auto m2 = run(parse_config_text(text), root2.string());
    REQUIRE(m1.passed());
    REQUIRE(m2.passed());
    CHECK(file_hashes(m1) == file_hashes(m2));
    CHECK(read_file(root1 / "r" / "heights.txt") == read_file(root2 / "r" / "heights.txt"));
}

TEST_CASE("qc run emits points and component records") {
    const auto root = fresh_dir("qc");
    auto cfg = parse_config_text(
        "engine = qc\nout = q\n[qc]\nalpha = 1.4142135623730951\nbeta = 1.7320508075688772\n"
        "window = 12\ncantor_gaps = 3\n");
    auto man = run(cfg, root.string());
    REQUIRE(man.passed());
    const auto pts = read_file(root / "q" / "points.txt");
    CHECK(pts.find("# qc-points v1 x y z height component") == 0);
    const auto comps = read_file(root / "q" / "components.txt");
    CHECK(comps.find("# qc-components v1") == 0);
    CHECK(comps.find("\nkept = ") != std::string::npos);
    for (const auto& [name, ok] : man.checks) CHECK(ok);
}

TEST_CASE("stable-norm run with builtin graphs") {
    const auto root = fresh_dir("sn");
    auto cfg = parse_config_text(
        "engine = stable-norm\nout = s\n[stable-norm]\ngraph = builtin:hedlund\neps = 0.1\n"
        "h = 1,0,0\nN = 8\ncount =\nsection = 1,0,0;0,1,0\ndirections = 17\n");
    // empty count value is a parse-time stod failure -> recorded per-run
    auto man = run(cfg, root.string());
    CHECK(man.status == "fail");

    auto cfg2 = parse_config_text(
        "engine = stable-norm\nout = s2\n[stable-norm]\ngraph = builtin:hedlund\neps = 0.1\n"
        "h = 1,0,0\nN = 8\nsection = 1,0,0;0,1,0\ndirections = 17\n");
    auto man2 = run(cfg2, root.string());
    REQUIRE(man2.passed());
    CHECK(read_file(root / "s2" / "estimate.txt").find("upper = ") != std::string::npos);
    CHECK(read_file(root / "s2" / "section.txt").find("# profile v1") == 0);
}

TEST_CASE("convex engine transforms a profile file") {
    const auto root = fresh_dir("convex");
    {
        std::ofstream out(root / "in.txt");
        out << "# profile v1 dim=1 provenance=test\n";
        for (double x = -2.0; x <= 2.0 + 1e-9; x += 0.1) out << fmt_g(x) << "\t" << fmt_g(0.5 * x * x) << "\n";
    }
    auto cfg = parse_config_text("engine = convex\nout = c\n[convex]\nin = " + (root / "in.txt").string() +
                                 "\ngrid = -1:1:21\n");
    auto man = run(cfg, root.string());
    REQUIRE(man.passed());
    auto alpha = SampledConvexProfile::load((root / "c" / "alpha.txt").string());
    CHECK(alpha.size() == 21);
    CHECK(alpha.value(10) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("sweep: K-monotone beta(1/2), order-stable results, parallelism-independent hashes") {
    const auto root1 = fresh_dir("sweep1");
    const auto root2 = fresh_dir("sweep2");
    std::vector<ExperimentConfig> configs;
    int idx = 0;
    for (double K : {0.0, 0.5, 1.0}) {
        auto cfg = parse_config_text("engine = beta-fk\nseed = 3\nout = k" + std::to_string(idx++) +
                                     "\n[beta-fk]\nK = " + fmt_g(K) + "\nQ = 6\nrestarts = 3\n");
        configs.push_back(cfg);
    }
    auto serial = sweep(configs, 1, root1.string());
    auto parallel = sweep(configs, 4, root2.string());
    REQUIRE(serial.size() == 3);
    REQUIRE(parallel.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        REQUIRE(serial[i].passed());
        CHECK(file_hashes(serial[i]) == file_hashes(parallel[i]));
    }
    double prev = -1.0;
    for (int i = 0; i < 3; ++i) {
        auto prof = SampledConvexProfile::load((root1 / ("k" + std::to_string(i)) / "beta.txt").string());
        const int half = prof.find_abscissa(0.5);
        REQUIRE(half >= 0);
        CHECK(prof.value(half) >= prev - 1e-12);
        prev = prof.value(half);
    }
}

TEST_CASE("sweep: empty list, duplicate outputs, and per-entry failures") {
    CHECK(sweep({}, 2).empty());
    auto good = parse_config_text("engine = beta-fk\nseed = 1\nout = same\n[beta-fk]\nK = 0\nQ = 4\n");
    CHECK_THROWS_AS(sweep({good, good}, 1), Error);

    const auto root = fresh_dir("sweepfail");
    auto bad = parse_config_text("engine = beta-fk\nseed = 1\nout = bad\n[beta-fk]\nK = 0\n");  // missing Q
    auto ok = parse_config_text("engine = beta-fk\nseed = 1\nout = ok\n[beta-fk]\nK = 0\nQ = 4\n");
    auto res = sweep({bad, ok}, 2, root.string());
    REQUIRE(res.size() == 2);
    CHECK(res[0].status == "fail");
    CHECK(!res[0].error.empty());
    CHECK(res[1].passed());
}

TEST_CASE("atomic outputs: no temp files remain") {
    const auto root = fresh_dir("atomic");
    auto cfg = parse_config_text("engine = beta-fk\nseed = 2\nout = a\n[beta-fk]\nK = 0.5\nQ = 5\n");
    auto man = run(cfg, root.string());
    REQUIRE(man.passed());
    for (const auto& entry : fs::recursive_directory_iterator(root))
        CHECK(entry.path().string().find(".tmp") == std::string::npos);
}

TEST_CASE("manifest serialization carries version, checks and config echo") {
    const auto root = fresh_dir("manifest");
    auto cfg = parse_config_text("engine = beta-fk\nseed = 2\nout = m\n[beta-fk]\nK = 0\nQ = 4\n");
    auto man = run(cfg, root.string());
    const auto text = man.serialize();
    CHECK(text.find("# run-manifest v1") == 0);
    CHECK(text.find("version = ") != std::string::npos);
    CHECK(text.find("engine = beta-fk") != std::string::npos);
    CHECK(text.find("#   engine = beta-fk") != std::string::npos);  // echo
}

}  // TEST_SUITE cli-runner
