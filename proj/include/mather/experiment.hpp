#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "mather/convex_profile.hpp"
#include "mather/frenkel_kontorova.hpp"
#include "mather/legendre.hpp"
#include "mather/plane_curves.hpp"
#include "mather/quasicrystal.hpp"
#include "mather/stable_norm.hpp"
#include "mather/step_sequence.hpp"
#include "mather/util.hpp"
#include "mather/version.hpp"

namespace mather::lab {

namespace fs = std::filesystem;

struct ExperimentConfig {
    std::string engine;  // beta-fk | stable-norm | torus-seq | qc | convex
    std::map<std::string, std::string> params;
    long long seed = 0;
    bool has_seed = false;
    std::string out;          // output directory, relative to the output root
    std::string source_path;  // where this config was read from
    std::string echo;         // raw config text
};

struct RunManifest {
    std::string engine;
    std::string status = "fail";  // pass | fail
    std::string error;
    long long wall_ms = 0;
    std::vector<std::pair<std::string, std::string>> files;  // name -> fnv hash
    std::vector<std::pair<std::string, bool>> checks;
    std::string config_echo;

    bool passed() const { return status == "pass"; }

    std::string serialize() const {
        std::ostringstream os;
        os << "# run-manifest v1\n";
        os << "version = " << kVersion << "\n";
        os << "engine = " << engine << "\n";
        os << "status = " << status << "\n";
        os << "wall_ms = " << wall_ms << "\n";
        if (!error.empty()) os << "error = " << error << "\n";
        for (const auto& [name, ok] : checks) os << "check " << name << " " << (ok ? "pass" : "fail") << "\n";
        for (const auto& [name, hash] : files) os << "file " << name << " fnv:" << hash << "\n";
        os << "# config:\n";
        std::istringstream echo(config_echo);
        std::string line;
        while (std::getline(echo, line)) os << "#   " << line << "\n";
        return os.str();
    }
};

// Flat key = value text with one [engine] section.
inline ExperimentConfig parse_config_text(const std::string& text, const std::string& source = "") {
    ExperimentConfig cfg;
    cfg.echo = text;
    cfg.source_path = source;
    std::istringstream in(text);
    std::string line, section;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[' && line.back() == ']') {
            require(section.empty(), "config: multiple sections (" + source + ")");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        require(eq != std::string::npos, "config: expected key = value at line " + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) {
            if (key == "engine") cfg.engine = value;
            else if (key == "seed") { cfg.seed = std::stoll(value); cfg.has_seed = true; }
            else if (key == "out") cfg.out = value;
            else throw Error("config: unknown top-level key '" + key + "' (" + source + ")");
        } else {
            require(!cfg.params.count(key), "config: duplicate key '" + key + "'");
            cfg.params[key] = value;
        }
    }
    require(!cfg.engine.empty(), "config: missing engine (" + source + ")");
    require(!cfg.out.empty(), "config: missing out (" + source + ")");
    require(section.empty() || section == cfg.engine,
            "config: section [" + section + "] does not match engine " + cfg.engine);
    return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

namespace detail {

struct EngineOutput {
    std::vector<std::pair<std::string, std::string>> files;  // name -> content
    std::vector<std::pair<std::string, bool>> checks;
};

inline double get_num(const ExperimentConfig& c, const std::string& key) {
    auto it = c.params.find(key);
    require(it != c.params.end(), "config: missing required key '" + key + "' for engine " + c.engine);
    return std::stod(it->second);
}
inline double get_num(const ExperimentConfig& c, const std::string& key, double fallback) {
    auto it = c.params.find(key);
    return it == c.params.end() ? fallback : std::stod(it->second);
}
inline std::string get_str(const ExperimentConfig& c, const std::string& key) {
    auto it = c.params.find(key);
    require(it != c.params.end(), "config: missing required key '" + key + "' for engine " + c.engine);
    return it->second;
}
inline std::string get_str(const ExperimentConfig& c, const std::string& key, const std::string& fallback) {
    auto it = c.params.find(key);
    return it == c.params.end() ? fallback : it->second;
}

inline void check_allowed_keys(const ExperimentConfig& c, const std::set<std::string>& allowed) {
    for (const auto& [k, v] : c.params)
        if (!allowed.count(k))
            throw Error("config: unknown key '" + k + "' for engine " + c.engine +
                        (c.source_path.empty() ? "" : " (" + c.source_path + ")"));
}

inline std::vector<long long> parse_int_list(const std::string& s) {
    std::vector<long long> out;
    std::string tok;
    std::istringstream in(s);
    while (std::getline(in, tok, ',')) out.push_back(std::stoll(tok));
    return out;
}

inline std::vector<torus::OpenInterval> parse_intervals(const std::string& s) {
    // "a,b;c,d" -> {(a,b), (c,d)}
    std::vector<torus::OpenInterval> out;
    std::string part;
    std::istringstream in(s);
    while (std::getline(in, part, ';')) {
        const auto comma = part.find(',');
        require(comma != std::string::npos, "K: expected 'lo,hi' pairs separated by ';'");
        out.push_back({std::stod(part.substr(0, comma)), std::stod(part.substr(comma + 1))});
    }
    return out;
}

inline std::string coverage_text(const torus::CoverageReport& rep, const std::string& header) {
    std::ostringstream os;
    os << "# coverage v1 " << header << "\n";
    os << "n = " << rep.n << "\n";
    os << "resolution = " << fmt_g(rep.resolution) << "\n";
    os << "covered_measure = " << fmt_g(rep.covered_measure) << "\n";
    os << "largest_gap = " << fmt_g(rep.largest_gap) << "\n";
    os << "domain = [" << fmt_g(rep.lo) << ", " << fmt_g(rep.hi) << (rep.circular ? ") circular" : "] linear")
       << "\n";
    return os.str();
}

// ---- engines ----

inline EngineOutput engine_beta_fk(const ExperimentConfig& c) {
    check_allowed_keys(c, {"K", "Q", "restarts"});
    require(c.has_seed, "config: beta-fk uses randomness, seed required");
    const double K = get_num(c, "K");
    const int Q = static_cast<int>(get_num(c, "Q"));
    const int restarts = static_cast<int>(get_num(c, "restarts", 8));

    fk::GeneratingFunction gf{fk::Potential::cosine(K)};
    EngineOutput out;
    // beta_profile throws on a failed certificate, which fails the run.
    const auto prof = fk::beta_profile(gf, Q, restarts, static_cast<std::uint64_t>(c.seed));
    const auto labels = prof.fraction_labels();
    const auto profile = prof.to_convex_profile();
    out.files.emplace_back("beta.txt", profile.serialize(&labels));
    out.checks.emplace_back("convexity_certificate", true);

    // Duality identity on a default dual grid containing 0.
    const auto alpha = fk::alpha_from_beta(prof, linspace(-1.5, 1.5, 301));
    double amin = alpha.value(0);
    for (int i = 0; i < alpha.size(); ++i) amin = std::min(amin, alpha.value(i));
    const double beta0 = prof.at(fk::Fraction{0, 1});
    out.checks.emplace_back("duality_identity", std::fabs(amin + beta0) <= Tolerances{}.dual);
    out.files.emplace_back("alpha.txt", alpha.serialize());
    return out;
}

inline EngineOutput engine_torus_seq(const ExperimentConfig& c) {
    check_allowed_keys(c, {"kind", "alpha", "beta", "n", "p_right", "delta"});
    const std::string kind = get_str(c, "kind");
    const double alpha = get_num(c, "alpha");
    const double beta = get_num(c, "beta");
    const std::size_t n = static_cast<std::size_t>(get_num(c, "n"));
    const double delta = get_num(c, "delta", 1e-3);

    const auto pair = (kind == "avoid") ? torus::make_pair_lenient(mod1(alpha), mod1(beta))
                                        : torus::make_irrational_pair(mod1(alpha), mod1(beta));
    torus::StepSequence seq;
    if (kind == "avoid") {
        seq = torus::avoid_interval_sequence(pair, n);
    } else if (kind == "random") {
        require(c.has_seed, "config: torus-seq kind=random requires seed");
        seq = torus::random_sequence(get_num(c, "p_right", 0.5), n, static_cast<std::uint64_t>(c.seed));
    } else if (kind == "fib") {
        seq = torus::substitution_sequence(torus::fibonacci_rules(), "0", n);
    } else if (kind == "allwords") {
        seq = torus::all_words_sequence(n);
    } else {
        throw Error("config: torus-seq kind must be avoid|random|fib|allwords, got " + kind);
    }

    const auto trace = torus::heights(seq, pair);
    const auto cov = torus::gap_analysis(trace, delta);

    std::ostringstream hs;
    hs << "# heights v1 kind=" << kind << " alpha=" << fmt_g(pair.alpha) << " beta=" << fmt_g(pair.beta)
       << " n=" << n << "\n";
    auto pos = seq.positions();
    for (std::size_t i = 0; i < trace.values.size(); ++i)
        hs << i << "\t" << pos[i].first << "\t" << pos[i].second << "\t" << fmt_g(trace.values[i]) << "\n";

    EngineOutput out;
    out.files.emplace_back("heights.txt", hs.str());
    out.files.emplace_back("coverage.txt",
                           coverage_text(cov, "kind=" + kind + " alpha=" + fmt_g(pair.alpha) +
                                                  " beta=" + fmt_g(pair.beta)));

    // Height recurrence spot check (first 10k increments).
    bool recur_ok = true;
    for (std::size_t i = 1; i < std::min<std::size_t>(trace.values.size(), 10000); ++i) {
        const double d = mod1(trace.values[i] - trace.values[i - 1]);
        const double da = std::min(std::fabs(d - mod1(pair.alpha)), std::fabs(d - mod1(-pair.alpha)));
        const double db = std::min(std::fabs(d - mod1(pair.beta)), std::fabs(d - mod1(-pair.beta)));
        if (std::min(da, db) > 1e-9) { recur_ok = false; break; }
    }
    out.checks.emplace_back("height_recurrence", recur_ok);

    if (kind == "avoid") {
        // Ulp guard: near-rational inputs park the orbit within float noise
        // of the branch boundary, so the open interval is tested with a
        // 1e-9 margin (generic pairs stay far clearer of it).
        const double A = std::min(pair.alpha, pair.beta - pair.alpha);
        bool sound = true;
        for (double v : trace.values)
            if (v > 1e-9 && v < A - 1e-9) { sound = false; break; }
        out.checks.emplace_back("avoid_interval_soundness", sound);
        std::ostringstream gs;
        gs << "# avoid v1 A = " << fmt_g(A) << "\n";
        out.files.emplace_back("avoid.txt", gs.str());
    }
    return out;
}

inline pgraph::PeriodicWeightedGraph resolve_graph(const ExperimentConfig& c, const std::string& spec) {
    if (spec == "builtin:flat2") return pgraph::flat_grid(2);
    if (spec == "builtin:flat3") return pgraph::flat_grid(3);
    if (spec == "builtin:hedlund") return pgraph::hedlund_graph(get_num(c, "eps", 0.1));
    return pgraph::PeriodicWeightedGraph::load(spec);
}

inline EngineOutput engine_stable_norm(const ExperimentConfig& c) {
    check_allowed_keys(c, {"graph", "eps", "h", "N", "count", "section", "directions", "margin"});
    const auto g = resolve_graph(c, get_str(c, "graph"));
    const int N = static_cast<int>(get_num(c, "N", 1));
    const long long margin = static_cast<long long>(get_num(c, "margin", 3));
    EngineOutput out;

    if (c.params.count("h")) {
        const auto hv = parse_int_list(get_str(c, "h"));
        require(static_cast<int>(hv.size()) == g.d, "stable-norm: h dimension mismatch");
        pgraph::Cell h{};
        for (int i = 0; i < g.d; ++i) h[i] = hv[static_cast<std::size_t>(i)];
        const auto est = pgraph::stable_norm(g, h, N, margin);
        std::ostringstream os;
        os << "# stable-norm v1\n";
        os << "h =";
        for (int i = 0; i < g.d; ++i) os << " " << h[i];
        os << "\nN = " << N << "\n";
        os << "upper = " << fmt_g(est.upper) << "\n";
        os << "lower = " << fmt_g(est.lower) << "\n";
        os << "value = " << fmt_g(est.value) << "\n";
        out.files.emplace_back("estimate.txt", os.str());
        if (g.symmetric) {
            pgraph::Cell mh{};
            for (int i = 0; i < g.d; ++i) mh[i] = -h[i];
            const auto mest = pgraph::stable_norm(g, mh, N, margin, false);
            out.checks.emplace_back("symmetry", mest.upper == est.upper);
        }
        out.checks.emplace_back("lower_le_value", est.lower <= est.value + 1e-15);
    }
    if (c.params.count("count")) {
        const double T = get_num(c, "count");
        const auto [count, ratio] = pgraph::count_classes(g, T, N, margin);
        std::ostringstream os;
        os << "# count v1\nT = " << fmt_g(T) << "\ncount = " << count << "\nratio = " << fmt_g(ratio) << "\n";
        out.files.emplace_back("count.txt", os.str());
        if (g.symmetric) out.checks.emplace_back("count_odd", count % 2 == 1);
    }
    if (c.params.count("section")) {
        const std::string spec = get_str(c, "section");
        const auto semi = spec.find(';');
        require(semi != std::string::npos, "stable-norm: section must be 'a;b'");
        const auto av = parse_int_list(spec.substr(0, semi));
        const auto bv = parse_int_list(spec.substr(semi + 1));
        require(static_cast<int>(av.size()) == g.d && static_cast<int>(bv.size()) == g.d,
                "stable-norm: section vector dimension mismatch");
        pgraph::Cell a{}, b{};
        for (int i = 0; i < g.d; ++i) { a[i] = av[static_cast<std::size_t>(i)]; b[i] = bv[static_cast<std::size_t>(i)]; }
        const int directions = static_cast<int>(get_num(c, "directions", 33));
        const auto section = pgraph::unit_ball_section(g, a, b, directions, N, margin);
        out.files.emplace_back("section.txt", section.serialize());
        out.checks.emplace_back("section_convexity", true);
    }
    require(!out.files.empty(), "stable-norm: nothing to do (need h, count or section)");
    return out;
}

inline EngineOutput engine_qc(const ExperimentConfig& c) {
    check_allowed_keys(c, {"alpha", "beta", "window", "cantor_gaps", "K", "dump_points"});
    const auto pair = torus::make_irrational_pair(mod1(get_num(c, "alpha")), mod1(get_num(c, "beta")));
    const long long N = static_cast<long long>(get_num(c, "window"));
    require(!(c.params.count("cantor_gaps") && c.params.count("K")),
            "qc: give either cantor_gaps or K, not both");
    std::vector<torus::OpenInterval> K;
    if (c.params.count("cantor_gaps")) K = torus::cantor_gaps(static_cast<int>(get_num(c, "cantor_gaps")));
    else if (c.params.count("K")) K = parse_intervals(get_str(c, "K"));

    const auto qc = torus::qc_build(pair, N);
    const auto rep = torus::qc_components(qc, K);

    EngineOutput out;
    std::ostringstream cs;
    cs << "# qc-components v1 alpha=" << fmt_g(pair.alpha) << " beta=" << fmt_g(pair.beta) << " window=" << N
       << " K=";
    for (std::size_t i = 0; i < K.size(); ++i)
        cs << (i ? ";" : "") << fmt_g(K[i].lo) << "," << fmt_g(K[i].hi);
    cs << "\n";
    cs << "points = " << qc.points.size() << "\n";
    cs << "degenerate_columns = " << qc.degenerate_columns.size() << "\n";
    cs << "kept = " << rep.kept_count << "\n";
    cs << "components = " << rep.components.size() << "\n";
    cs << "spanning = " << (rep.any_spanning ? 1 : 0) << "\n";
    cs << "# id size xmin xmax ymin ymax zmin zmax spanning dirx diry dirz\n";
    for (const auto& comp : rep.components) {
        cs << "c " << comp.id << " " << comp.size << " " << comp.xmin << " " << comp.xmax << " " << comp.ymin
           << " " << comp.ymax << " " << comp.zmin << " " << comp.zmax << " " << (comp.spanning ? 1 : 0);
        cs << " " << fmt_g(comp.direction[0]) << " " << fmt_g(comp.direction[1]) << " "
           << fmt_g(comp.direction[2]) << "\n";
    }
    out.files.emplace_back("components.txt", cs.str());

    if (get_str(c, "dump_points", "1") != "0") {
        std::ostringstream ps;
        ps << "# qc-points v1 x y z height component\n";
        for (std::size_t i = 0; i < qc.points.size(); ++i) {
            const auto& pt = qc.points[i];
            ps << pt.x << " " << pt.y << " " << pt.z << " " << fmt_g(pt.height) << " " << rep.labels[i]
               << "\n";
        }
        out.files.emplace_back("points.txt", ps.str());
    }

    bool strict = true;
    for (const auto& pt : qc.points)
        if (!(pt.height > 0.0 && pt.height < 1.0)) strict = false;
    out.checks.emplace_back("heights_strict", strict);
    out.checks.emplace_back("one_point_per_nondegenerate_column",
                            static_cast<long long>(qc.points.size()) +
                                    static_cast<long long>(qc.degenerate_columns.size()) ==
                                qc.columns());
    return out;
}

inline EngineOutput engine_convex(const ExperimentConfig& c) {
    check_allowed_keys(c, {"in", "grid"});
    const auto profile = SampledConvexProfile::load(get_str(c, "in"));
    const std::string grid_spec = get_str(c, "grid");  // lo:hi:count
    const auto c1 = grid_spec.find(':'), c2 = grid_spec.rfind(':');
    require(c1 != std::string::npos && c2 != c1, "convex: grid must be lo:hi:count");
    const auto grid = linspace(std::stod(grid_spec.substr(0, c1)),
                               std::stod(grid_spec.substr(c1 + 1, c2 - c1 - 1)),
                               std::stoi(grid_spec.substr(c2 + 1)));
    const auto alpha = legendre_transform(profile, grid);

    EngineOutput out;
    out.files.emplace_back("alpha.txt", alpha.serialize());
    const int zero = profile.find_abscissa(0.0);
    if (zero >= 0) {
        double amin = alpha.value(0);
        for (int i = 0; i < alpha.size(); ++i) amin = std::min(amin, alpha.value(i));
        out.checks.emplace_back("duality_identity",
                                std::fabs(amin + profile.value(zero)) <= Tolerances{}.dual);
    }
    return out;
}

inline EngineOutput dispatch(const ExperimentConfig& c) {
    if (c.engine == "beta-fk") return engine_beta_fk(c);
    if (c.engine == "torus-seq") return engine_torus_seq(c);
    if (c.engine == "stable-norm") return engine_stable_norm(c);
    if (c.engine == "qc") return engine_qc(c);
    if (c.engine == "convex") return engine_convex(c);
    throw Error("config: unknown engine " + c.engine);
}

inline void atomic_write(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    const fs::path tmp = path.parent_path() / ("." + path.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary);
        require(static_cast<bool>(out), "cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
}

}  // namespace detail

// Runs one experiment: dispatches to the engine, writes outputs and the
// manifest temp-then-rename, records per-file content hashes and the
// engine's embedded assertion results.
inline RunManifest run(const ExperimentConfig& config, const std::string& output_root = ".") {
    RunManifest man;
    man.engine = config.engine;
    man.config_echo = config.echo;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        auto out = detail::dispatch(config);
        const fs::path dir = fs::path(output_root) / config.out;
        for (const auto& [name, content] : out.files) {
            detail::atomic_write(dir / name, content);
            man.files.emplace_back(name, hex64(fnv1a64(content.data(), content.size())));
        }
        man.checks = out.checks;
        bool all = true;
        for (const auto& [name, ok] : man.checks) all = all && ok;
        man.status = all ? "pass" : "fail";
    } catch (const std::exception& e) {
        man.status = "fail";
        man.error = e.what();
    }
    man.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0)
                      .count();
    if (!config.out.empty() && man.error.empty()) {
        const fs::path dir = fs::path(output_root) / config.out;
        detail::atomic_write(dir / "manifest.txt", man.serialize());
    }
    return man;
}

// Runs configs concurrently (up to `parallelism` workers); the result list
// keeps the input order and failures are recorded per entry.
inline std::vector<RunManifest> sweep(const std::vector<ExperimentConfig>& configs, int parallelism,
                                      const std::string& output_root = ".") {
    require(parallelism >= 1, "sweep: parallelism must be >= 1");
    std::set<std::string> outs;
    for (const auto& c : configs)
        require(outs.insert(c.out).second, "sweep: duplicate output directory " + c.out);

    std::vector<RunManifest> results(configs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= configs.size()) return;
            results[i] = run(configs[i], output_root);
        }
    };
    std::vector<std::thread> pool;
    const int jobs = std::min<int>(parallelism, static_cast<int>(configs.size()));
    pool.reserve(static_cast<std::size_t>(std::max(jobs, 1)));
    for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return results;
}

}  // namespace mather::lab
