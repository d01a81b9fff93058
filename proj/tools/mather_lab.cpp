// mather-lab: command-line front end for the numerical laboratory.
//
// Subcommands: beta-fk, stable-norm, torus-seq, qc, convex, run, sweep.
// `run` and `sweep` execute declarative configs; the other subcommands are
// direct shortcuts that assemble the equivalent config in memory.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "mather/experiment.hpp"
#include "mather/version.hpp"

namespace fs = std::filesystem;
using namespace mather;

namespace {

std::string output_root() {
    const char* env = std::getenv("MATHER_LAB_OUT");
    return env && *env ? env : ".";
}

int finish(const lab::RunManifest& man, const std::string& out_file_hint) {
    for (const auto& [name, ok] : man.checks)
        std::cout << "check " << name << ": " << (ok ? "pass" : "fail") << "\n";
    if (!man.error.empty()) std::cerr << "error: " << man.error << "\n";
    if (!out_file_hint.empty() && man.passed()) std::cout << "wrote " << out_file_hint << "\n";
    return man.passed() ? 0 : 1;
}

// The direct subcommands write into the directory of --out and rename the
// engine's primary file to the requested name.
lab::RunManifest run_adhoc(lab::ExperimentConfig cfg, const std::string& out_path,
                           const std::string& primary) {
    const fs::path out(out_path);
    const fs::path dir = out.parent_path().empty() ? fs::path(".") : out.parent_path();
    cfg.out = ".";
    auto man = lab::run(cfg, dir.string());
    if (man.passed() && !primary.empty() && out.filename().string() != primary) {
        fs::rename(dir / primary, out);
        for (auto& [name, hash] : man.files)
            if (name == primary) name = out.filename().string();
        lab::detail::atomic_write(dir / "manifest.txt", man.serialize());
    }
    return man;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mather-lab: convex duality, minimal action and torus-curve experiments"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // beta-fk
    double K = 0.0;
    int Q = 8, restarts = 8;
    long long seed = 1;
    std::string out_path;
    auto* beta = app.add_subcommand("beta-fk", "minimal-action beta profile over Farey fractions");
    beta->add_option("--K", K, "potential strength")->required();
    beta->add_option("--Q", Q, "Farey depth")->required();
    beta->add_option("--restarts", restarts, "random restarts per fraction");
    beta->add_option("--seed", seed, "rng seed")->required();
    beta->add_option("--out", out_path, "output profile path")->required();

    // stable-norm
    std::string graph_spec, h_spec, section_spec;
    int N = 1, directions = 33;
    double eps = 0.1, count_T = -1.0;
    auto* sn = app.add_subcommand("stable-norm", "stable norms of periodic weighted graphs");
    sn->set_help_flag("--help", "print help");  // frees -h so --h can name the class
    sn->add_option("--graph", graph_spec, "graph file or builtin:flat2|flat3|hedlund")->required();
    sn->add_option("--eps", eps, "cheap-line weight for builtin:hedlund");
    sn->add_option("--h", h_spec, "integer class, e.g. 1,0,0");
    sn->add_option("--N", N, "lift multiplier");
    sn->add_option("--section", section_spec, "plane 'a;b', e.g. 1,0,0;0,1,0");
    sn->add_option("--directions", directions, "section sample count");
    sn->add_option("--count", count_T, "count classes with norm <= T");
    sn->add_option("--out", out_path, "output directory")->required();

    // torus-seq
    std::string kind;
    double alpha = 0.0, beta_v = 0.0, p_right = 0.5, delta = 1e-3;
    long long n_steps = 1000;
    auto* ts = app.add_subcommand("torus-seq", "lattice walks and heights mod 1");
    ts->add_option("--kind", kind, "avoid|random|fib|allwords")->required();
    ts->add_option("--alpha", alpha, "alpha")->required();
    ts->add_option("--beta", beta_v, "beta")->required();
    ts->add_option("--n", n_steps, "steps")->required();
    ts->add_option("--seed", seed, "rng seed (random kind)");
    ts->add_option("--p-right", p_right, "P(step = +(1,0)) for random kind");
    ts->add_option("--delta", delta, "coverage resolution");
    ts->add_option("--out", out_path, "output heights path")->required();

    // qc
    long long window = 30;
    int cantor_m = 0;
    std::string K_spec;
    auto* qc = app.add_subcommand("qc", "cut-and-project quasicrystal components");
    qc->add_option("--alpha", alpha, "alpha")->required();
    qc->add_option("--beta", beta_v, "beta")->required();
    qc->add_option("--window", window, "window size N for [0,N]^2 columns")->required();
    qc->add_option("--cantor-gaps", cantor_m, "m largest Cantor gaps as forbidden K");
    qc->add_option("--K", K_spec, "forbidden intervals 'a,b;c,d'");
    qc->add_option("--out", out_path, "output directory")->required();

    // convex
    std::string in_profile, grid_spec;
    auto* cv = app.add_subcommand("convex", "Legendre transform of a sampled profile");
    cv->add_option("--in", in_profile, "input profile")->required();
    cv->add_option("--grid", grid_spec, "dual grid lo:hi:count")->required();
    cv->add_option("--out", out_path, "output profile path")->required();

    // run / sweep
    std::string config_path, sweep_dir;
    int jobs = 1;
    auto* runc = app.add_subcommand("run", "run one declarative config");
    runc->add_option("config", config_path, "config file")->required();
    auto* sweepc = app.add_subcommand("sweep", "run every *.cfg in a directory");
    sweepc->add_option("dir", sweep_dir, "config directory")->required();
    sweepc->add_option("--jobs", jobs, "parallel workers");

    CLI11_PARSE(app, argc, argv);

    try {
        if (beta->parsed()) {
            lab::ExperimentConfig cfg;
            cfg.engine = "beta-fk";
            cfg.seed = seed;
            cfg.has_seed = true;
            cfg.params = {{"K", fmt_g(K)}, {"Q", std::to_string(Q)}, {"restarts", std::to_string(restarts)}};
            cfg.echo = "# ad hoc beta-fk";
            return finish(run_adhoc(cfg, out_path, "beta.txt"), out_path);
        }
        if (sn->parsed()) {
            lab::ExperimentConfig cfg;
            cfg.engine = "stable-norm";
            cfg.params = {{"graph", graph_spec}, {"N", std::to_string(N)}};
            if (sn->count("--eps")) cfg.params["eps"] = fmt_g(eps);
            if (!h_spec.empty()) cfg.params["h"] = h_spec;
            if (!section_spec.empty()) {
                cfg.params["section"] = section_spec;
                cfg.params["directions"] = std::to_string(directions);
            }
            if (count_T > 0) cfg.params["count"] = fmt_g(count_T);
            cfg.echo = "# ad hoc stable-norm";
            cfg.out = out_path;
            auto man = lab::run(cfg, output_root());
            return finish(man, out_path);
        }
        if (ts->parsed()) {
            lab::ExperimentConfig cfg;
            cfg.engine = "torus-seq";
            cfg.seed = seed;
            cfg.has_seed = ts->count("--seed") > 0 || kind == "random";
            cfg.params = {{"kind", kind},
                          {"alpha", fmt_g(alpha, 17)},
                          {"beta", fmt_g(beta_v, 17)},
                          {"n", std::to_string(n_steps)},
                          {"delta", fmt_g(delta)}};
            if (kind == "random") cfg.params["p_right"] = fmt_g(p_right);
            cfg.echo = "# ad hoc torus-seq";
            return finish(run_adhoc(cfg, out_path, "heights.txt"), out_path);
        }
        if (qc->parsed()) {
            lab::ExperimentConfig cfg;
            cfg.engine = "qc";
            cfg.params = {{"alpha", fmt_g(alpha, 17)},
                          {"beta", fmt_g(beta_v, 17)},
                          {"window", std::to_string(window)}};
            if (qc->count("--cantor-gaps")) cfg.params["cantor_gaps"] = std::to_string(cantor_m);
            if (!K_spec.empty()) cfg.params["K"] = K_spec;
            cfg.echo = "# ad hoc qc";
            cfg.out = out_path;
            auto man = lab::run(cfg, output_root());
            return finish(man, out_path);
        }
        if (cv->parsed()) {
            lab::ExperimentConfig cfg;
            cfg.engine = "convex";
            cfg.params = {{"in", in_profile}, {"grid", grid_spec}};
            cfg.echo = "# ad hoc convex";
            return finish(run_adhoc(cfg, out_path, "alpha.txt"), out_path);
        }
        if (runc->parsed()) {
            auto cfg = lab::parse_config_file(config_path);
            auto man = lab::run(cfg, output_root());
            std::cout << man.serialize();
            return man.passed() ? 0 : 1;
        }
        if (sweepc->parsed()) {
            std::vector<lab::ExperimentConfig> configs;
            std::vector<fs::path> files;
            for (const auto& entry : fs::directory_iterator(sweep_dir))
                if (entry.path().extension() == ".cfg") files.push_back(entry.path());
            std::sort(files.begin(), files.end());
            for (const auto& f : files) configs.push_back(lab::parse_config_file(f.string()));
            require(!configs.empty(), "sweep: no *.cfg files in " + sweep_dir);
            auto manifests = lab::sweep(configs, jobs, output_root());
            bool all = true;
            for (std::size_t i = 0; i < manifests.size(); ++i) {
                std::cout << files[i].filename().string() << ": " << manifests[i].status << "\n";
                all = all && manifests[i].passed();
            }
            return all ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "mather-lab: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
