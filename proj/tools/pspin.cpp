// Command-line front end for the sweep experiments.
//
//   pspin scaling     --n 8,12 --p-exp 2 --restarts 20
//   pspin field-sweep --n 32 --p-exp 3 --depth 15 --h 0:3:0.25 --scheme r,l
//   pspin iters       --n 8:20:4
//   pspin p1-table    --p-exp 2,3 --n 3:9
//   pspin gap         --p-exp 3 --n 16:64:8
//   pspin verify
//
// Exit codes: 0 success, 1 invalid configuration, 2 some tasks failed (the
// table is still written, failed rows carry a status message).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "pspin/experiment.hpp"
#include "pspin/grid.hpp"
#include "pspin/verify.hpp"

namespace {

struct Flags {
    std::string n, p, h, depth, scheme, config, out, format;
    std::optional<double> dt, noise, grad_tol;
    std::optional<int> restarts, workers, max_iters;
    std::optional<std::uint64_t> seed;
};

void add_experiment_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--n", f.n, "system sizes, e.g. 8,12 or 8:20:4");
    cmd->add_option("--p-exp", f.p, "interaction exponents p");
    cmd->add_option("--h", f.h, "transverse fields, e.g. 0.5 or 0:3:0.25");
    cmd->add_option("--depth", f.depth, "circuit depths P");
    cmd->add_option("--scheme", f.scheme, "initialization schemes: r, l or r,l");
    cmd->add_option("--dt", f.dt, "l-init time step");
    cmd->add_option("--noise", f.noise, "l-init multiplicative noise amplitude");
    cmd->add_option("--restarts", f.restarts, "restarts per grid point");
    cmd->add_option("--seed", f.seed, "base seed");
    cmd->add_option("--workers", f.workers, "worker threads");
    cmd->add_option("--grad-tol", f.grad_tol, "BFGS gradient tolerance (infinity norm)");
    cmd->add_option("--max-iters", f.max_iters, "BFGS iteration limit");
    cmd->add_option("--out", f.out, "output file (default: standard output)");
    cmd->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--config", f.config, "JSON experiment configuration; flags override its fields");
}

std::vector<std::string> split_names(const std::string& s) {
    std::vector<std::string> out;
    for (auto part : pspin::split_schema(s))
        if (!part.empty()) out.push_back(part);
    return out;
}

pspin::ExperimentConfig resolve(pspin::ExperimentKind kind, const Flags& f) {
    pspin::ExperimentConfig cfg;
    if (!f.config.empty()) {
        std::ifstream is(f.config);
        if (!is) throw std::invalid_argument("cannot read config file '" + f.config + "'");
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(is);
        } catch (const nlohmann::json::exception& e) {
            throw std::invalid_argument("config file '" + f.config + "': " + e.what());
        }
        cfg = pspin::config_from_json(j, cfg);
    }
    cfg.kind = kind;
    if (!f.n.empty()) cfg.n_grid = pspin::parse_int_grid(f.n);
    if (!f.p.empty()) cfg.p_grid = pspin::parse_int_grid(f.p);
    if (!f.h.empty()) cfg.h_grid = pspin::parse_real_grid(f.h);
    if (!f.depth.empty()) cfg.depth_grid = pspin::parse_int_grid(f.depth);
    if (!f.scheme.empty()) cfg.schemes = split_names(f.scheme);
    if (f.dt) cfg.dt = *f.dt;
    if (f.noise) cfg.noise_amplitude = *f.noise;
    if (f.restarts) cfg.n_restarts = *f.restarts;
    if (f.seed) cfg.base_seed = *f.seed;
    if (f.workers) cfg.workers = *f.workers;
    if (f.grad_tol) cfg.optimizer.grad_tol = *f.grad_tol;
    if (f.max_iters) cfg.optimizer.max_iters = *f.max_iters;
    if (!f.out.empty()) cfg.output_path = f.out;
    if (!f.format.empty()) cfg.format = f.format;
    cfg = pspin::with_defaults(std::move(cfg));
    cfg.validate();
    return cfg;
}

int run(pspin::ExperimentKind kind, const Flags& flags) {
    pspin::ExperimentConfig cfg;
    try {
        cfg = resolve(kind, flags);
    } catch (const std::exception& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return 1;
    }
    const auto table = pspin::run_experiment(cfg);
    const auto format = pspin::parse_format(cfg.format);
    const auto config_json = pspin::config_to_json(cfg);
    if (cfg.output_path.empty())
        pspin::write_table(table, format, std::cout, config_json);
    else
        pspin::emit_results(table, format, cfg.output_path, config_json);
    if (pspin::has_failures(table)) {
        std::cerr << "some tasks failed; see the status column\n";
        return 2;
    }
    return 0;
}

int run_verify() {
    bool all = true;
    for (const auto& c : pspin::run_verify_suite()) {
        std::cout << (c.passed ? "PASS  " : "FAIL  ") << c.name << ": " << c.detail << '\n';
        all &= c.passed;
    }
    return all ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"QAOA on the fully-connected p-spin model: sweeps, exact solutions and checks"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print this help message and exit");

    struct Command {
        const char* name;
        const char* help;
        pspin::ExperimentKind kind;
    };
    const Command commands[] = {
        {"scaling", "residual energy against depth (r-init by default)", pspin::ExperimentKind::Scaling},
        {"field-sweep", "residual energy against transverse field", pspin::ExperimentKind::FieldSweep},
        {"iters", "BFGS iterations at the critical depth", pspin::ExperimentKind::IterationScaling},
        {"p1-table", "exact depth-1 angles evaluated at h = 0", pspin::ExperimentKind::P1Table},
        {"gap", "minimal spectral gap near the transition", pspin::ExperimentKind::GapScaling},
    };
    Flags flags;
    std::vector<std::pair<CLI::App*, pspin::ExperimentKind>> subs;
    for (const auto& c : commands) {
        auto* sub = app.add_subcommand(c.name, c.help);
        add_experiment_flags(sub, flags);
        subs.emplace_back(sub, c.kind);
    }
    auto* verify = app.add_subcommand("verify", "run the analytic, symmetry and identity checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (verify->parsed()) return run_verify();
        for (const auto& [sub, kind] : subs)
            if (sub->parsed()) return run(kind, flags);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
