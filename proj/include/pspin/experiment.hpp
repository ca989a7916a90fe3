#pragma once

// Sweep experiments over (N, p, h, P, scheme) grids. Every experiment is a
// pure function of its ExperimentConfig: restart seeds come from task_seed
// keyed on grid coordinates, and aggregation sorts samples first, so the
// worker count never changes a result.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "pspin/analytic.hpp"
#include "pspin/fitting.hpp"
#include "pspin/optimizer.hpp"
#include "pspin/parallel.hpp"
#include "pspin/table.hpp"

namespace pspin {

enum class ExperimentKind { Scaling, FieldSweep, IterationScaling, P1Table, GapScaling };

inline std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Scaling: return "scaling";
        case ExperimentKind::FieldSweep: return "field-sweep";
        case ExperimentKind::IterationScaling: return "iteration-scaling";
        case ExperimentKind::P1Table: return "p1-table";
        case ExperimentKind::GapScaling: return "gap-scaling";
    }
    return "unknown";
}

inline ExperimentKind parse_kind(const std::string& s) {
    if (s == "scaling") return ExperimentKind::Scaling;
    if (s == "field-sweep") return ExperimentKind::FieldSweep;
    if (s == "iteration-scaling" || s == "iters") return ExperimentKind::IterationScaling;
    if (s == "p1-table") return ExperimentKind::P1Table;
    if (s == "gap-scaling" || s == "gap") return ExperimentKind::GapScaling;
    throw std::invalid_argument("unknown experiment kind '" + s + "'");
}

inline constexpr std::uint64_t kDefaultSeed = 2021;

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Scaling;
    std::vector<int> n_grid;
    std::vector<int> p_grid;
    std::vector<double> h_grid;
    std::vector<int> depth_grid;  // scaling: empty means 1..P* for each (N, p)
    std::vector<std::string> schemes;
    double dt = 1.0;
    double noise_amplitude = 0.05;
    int n_restarts = 20;
    std::uint64_t base_seed = kDefaultSeed;
    int workers = 1;
    std::string output_path;  // empty: standard output
    std::string format = "csv";
    OptimizerConfig optimizer;

    void validate() const;
    friend bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
        auto opt = [](const OptimizerConfig& o) {
            return std::tie(o.grad_tol, o.max_iters, o.wolfe_c1, o.wolfe_c2, o.stagnation_tol, o.max_line_search_evals);
        };
        return std::tie(a.kind, a.n_grid, a.p_grid, a.h_grid, a.depth_grid, a.schemes, a.dt, a.noise_amplitude,
                        a.n_restarts, a.base_seed, a.workers, a.output_path, a.format) ==
                   std::tie(b.kind, b.n_grid, b.p_grid, b.h_grid, b.depth_grid, b.schemes, b.dt, b.noise_amplitude,
                            b.n_restarts, b.base_seed, b.workers, b.output_path, b.format) &&
               opt(a.optimizer) == opt(b.optimizer);
    }
};

/// Fills empty grids with the per-kind defaults.
inline ExperimentConfig with_defaults(ExperimentConfig c) {
    auto fill = [](auto& grid, auto values) {
        if (grid.empty()) grid = values;
    };
    switch (c.kind) {
        case ExperimentKind::Scaling:
            fill(c.n_grid, std::vector<int>{8});
            fill(c.p_grid, std::vector<int>{2});
            fill(c.h_grid, std::vector<double>{kGoldenField});
            fill(c.schemes, std::vector<std::string>{"r"});
            break;
        case ExperimentKind::FieldSweep: {
            std::vector<double> h;
            for (int i = 0; i <= 12; ++i) h.push_back(0.25 * i);
            fill(c.n_grid, std::vector<int>{32});
            fill(c.p_grid, std::vector<int>{3});
            fill(c.h_grid, h);
            fill(c.depth_grid, std::vector<int>{15});
            fill(c.schemes, std::vector<std::string>{"r", "l"});
            break;
        }
        case ExperimentKind::IterationScaling:
            fill(c.n_grid, std::vector<int>{8, 12, 16, 20});
            fill(c.p_grid, std::vector<int>{2});
            fill(c.h_grid, std::vector<double>{kGoldenField});
            fill(c.schemes, std::vector<std::string>{"r"});
            break;
        case ExperimentKind::P1Table:
            fill(c.n_grid, std::vector<int>{3, 4, 5, 7, 9});
            fill(c.p_grid, std::vector<int>{2, 3});
            break;
        case ExperimentKind::GapScaling:
            fill(c.n_grid, std::vector<int>{64, 128, 256, 512});
            fill(c.p_grid, std::vector<int>{2});
            break;
    }
    return c;
}

inline InitScheme make_scheme(const std::string& name, double dt, double noise) {
    if (name == "r") return RandomInit{};
    if (name == "l") return LinearInit{dt, noise};
    throw std::invalid_argument("unknown scheme '" + name + "' (expected r or l)");
}

inline void ExperimentConfig::validate() const {
    auto fail = [](const std::string& m) { throw std::invalid_argument("ExperimentConfig: " + m); };
    const bool uses_fields = kind != ExperimentKind::P1Table && kind != ExperimentKind::GapScaling;
    const bool uses_depths = kind == ExperimentKind::Scaling || kind == ExperimentKind::FieldSweep;
    const bool optimizes = uses_fields;
    if (n_grid.empty()) fail("N grid is empty");
    if (p_grid.empty()) fail("p grid is empty");
    if (uses_fields && h_grid.empty()) fail("h grid is empty");
    if (kind == ExperimentKind::FieldSweep && depth_grid.empty()) fail("depth grid is empty");
    if (optimizes && schemes.empty()) fail("scheme list is empty");
    for (int n : n_grid)
        if (n < 1) fail("N must be >= 1");
    for (int p : p_grid)
        if (p < 2) fail("p must be >= 2");
    for (double h : h_grid)
        if (!std::isfinite(h) || h < 0.0) fail("h must be finite and >= 0");
    if (uses_depths)
        for (int d : depth_grid)
            if (d < 1) fail("depth must be >= 1");
    for (const auto& s : schemes) make_scheme(s, dt, noise_amplitude);
    if (!(dt > 0.0)) fail("dt must be > 0");
    if (!(noise_amplitude >= 0.0)) fail("noise amplitude must be >= 0");
    if (n_restarts < 1) fail("restarts must be >= 1");
    if (workers < 1) fail("workers must be >= 1");
    parse_format(format);
    optimizer.validate();
    for (int n : n_grid)
        for (int p : p_grid) ProblemSpec(n, p, 0.0);
    if (!output_path.empty()) {
        namespace fs = std::filesystem;
        const fs::path path(output_path);
        const fs::path parent = path.has_parent_path() ? path.parent_path() : fs::path(".");
        if (!fs::is_directory(parent)) fail("output directory '" + parent.string() + "' does not exist");
        if (fs::is_directory(path)) fail("output path '" + output_path + "' is a directory");
    }
}

// ---------------------------------------------------------------------------
// JSON form of the configuration

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
    const auto& o = c.optimizer;
    return {{"kind", to_string(c.kind)},
            {"n", c.n_grid},
            {"p", c.p_grid},
            {"h", c.h_grid},
            {"depth", c.depth_grid},
            {"schemes", c.schemes},
            {"dt", c.dt},
            {"noise", c.noise_amplitude},
            {"restarts", c.n_restarts},
            {"seed", c.base_seed},
            {"workers", c.workers},
            {"out", c.output_path},
            {"format", c.format},
            {"optimizer",
             {{"grad_tol", o.grad_tol},
              {"max_iters", o.max_iters},
              {"wolfe_c1", o.wolfe_c1},
              {"wolfe_c2", o.wolfe_c2},
              {"stagnation_tol", o.stagnation_tol},
              {"max_line_search_evals", o.max_line_search_evals}}}};
}

/// Overrides fields of `base` with those present in `j`. An emitted result
/// file is accepted too: its "config" member is used.
inline ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {}) {
    if (!j.is_object()) throw std::invalid_argument("ExperimentConfig: JSON must be an object");
    if (j.contains("config") && j.contains("rows")) return config_from_json(j.at("config"), std::move(base));
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "kind") base.kind = parse_kind(value.get<std::string>());
            else if (key == "n") base.n_grid = value.get<std::vector<int>>();
            else if (key == "p") base.p_grid = value.get<std::vector<int>>();
            else if (key == "h") base.h_grid = value.get<std::vector<double>>();
            else if (key == "depth") base.depth_grid = value.get<std::vector<int>>();
            else if (key == "schemes") base.schemes = value.get<std::vector<std::string>>();
            else if (key == "dt") base.dt = value.get<double>();
            else if (key == "noise") base.noise_amplitude = value.get<double>();
            else if (key == "restarts") base.n_restarts = value.get<int>();
            else if (key == "seed") base.base_seed = value.get<std::uint64_t>();
            else if (key == "workers") base.workers = value.get<int>();
            else if (key == "out") base.output_path = value.get<std::string>();
            else if (key == "format") base.format = value.get<std::string>();
            else if (key == "optimizer") {
                auto& o = base.optimizer;
                for (const auto& [ok, ov] : value.items()) {
                    if (ok == "grad_tol") o.grad_tol = ov.get<double>();
                    else if (ok == "max_iters") o.max_iters = ov.get<int>();
                    else if (ok == "wolfe_c1") o.wolfe_c1 = ov.get<double>();
                    else if (ok == "wolfe_c2") o.wolfe_c2 = ov.get<double>();
                    else if (ok == "stagnation_tol") o.stagnation_tol = ov.get<double>();
                    else if (ok == "max_line_search_evals") o.max_line_search_evals = ov.get<int>();
                    else throw std::invalid_argument("unknown optimizer key '" + ok + "'");
                }
            } else {
                throw std::invalid_argument("unknown key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("ExperimentConfig: ") + e.what());
    }
    return base;
}

// ---------------------------------------------------------------------------
// Multi-start sweeps

struct SweepPoint {
    ProblemSpec spec;
    int depth = 1;
    std::string scheme = "r";
};

struct SweepRow {
    int n_sites = 0;
    int p_exponent = 0;
    double field = 0.0;
    int depth = 0;
    std::string scheme;
    double collapse = 0.0;
    double critical_field = 0.0;
    int n_restarts = 0;
    SampleStats residual;
    SampleStats iterations;
    SampleStats annealing_time;
    int n_nonconverged = 0;
    std::string status = "ok";

    bool failed() const { return status != "ok"; }
};

inline const std::string kSweepSchema =
    "N,p,h,P,scheme,collapse,h_c,n_restarts,mean_residual,std_residual,sem_residual,min_residual,max_residual,"
    "mean_iters,std_iters,mean_annealing_time,n_nonconverged,status";

inline Table sweep_table(const std::vector<SweepRow>& rows, const std::string& kind) {
    Table t(kind, split_schema(kSweepSchema));
    for (const auto& r : rows)
        t.add_row({std::int64_t{r.n_sites}, std::int64_t{r.p_exponent}, r.field, std::int64_t{r.depth}, r.scheme,
                   r.collapse, r.critical_field, std::int64_t{r.n_restarts}, r.residual.mean, r.residual.std_dev,
                   r.residual.std_error, r.residual.min, r.residual.max, r.iterations.mean, r.iterations.std_dev,
                   r.annealing_time.mean, std::int64_t{r.n_nonconverged}, r.status});
    return t;
}

/// Runs every (point, restart) task on the worker pool. Failures are caught
/// per task and reported on the row; the other tasks still run.
inline std::vector<SweepRow> run_sweep(std::vector<SweepPoint> points, const ExperimentConfig& cfg) {
    std::sort(points.begin(), points.end(), [](const SweepPoint& a, const SweepPoint& b) {
        return std::tie(a.spec.p_exponent, a.spec.n_sites, a.spec.field, a.scheme, a.depth) <
               std::tie(b.spec.p_exponent, b.spec.n_sites, b.spec.field, b.scheme, b.depth);
    });

    using Key = std::tuple<int, int, std::uint64_t>;
    std::map<Key, std::shared_ptr<const QaoaProblem>> problems;
    std::map<Key, std::string> problem_errors;
    for (const auto& pt : points) {
        const Key key{pt.spec.n_sites, pt.spec.p_exponent, std::bit_cast<std::uint64_t>(pt.spec.field)};
        if (problems.contains(key) || problem_errors.contains(key)) continue;
        try {
            problems[key] = std::make_shared<const QaoaProblem>(pt.spec);
        } catch (const std::exception& e) {
            problem_errors[key] = e.what();
        }
    }

    const auto restarts = static_cast<std::size_t>(cfg.n_restarts);
    std::vector<std::optional<OptimizationResult>> results(points.size() * restarts);
    std::vector<std::string> errors(results.size());
    parallel_for(results.size(), cfg.workers, [&](std::size_t task) {
        const auto& pt = points[task / restarts];
        const int restart = static_cast<int>(task % restarts);
        const Key key{pt.spec.n_sites, pt.spec.p_exponent, std::bit_cast<std::uint64_t>(pt.spec.field)};
        try {
            if (const auto it = problem_errors.find(key); it != problem_errors.end()) throw std::runtime_error(it->second);
            const auto seed = task_seed(cfg.base_seed, pt.spec.n_sites, pt.depth, pt.spec.field, restart);
            results[task] = optimize(*problems.at(key), pt.depth, make_scheme(pt.scheme, cfg.dt, cfg.noise_amplitude),
                                     cfg.optimizer, seed);
        } catch (const std::exception& e) {
            errors[task] = e.what();
        }
    });

    std::vector<SweepRow> rows;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& pt = points[i];
        SweepRow row;
        row.n_sites = pt.spec.n_sites;
        row.p_exponent = pt.spec.p_exponent;
        row.field = pt.spec.field;
        row.depth = pt.depth;
        row.scheme = pt.scheme;
        row.collapse = pt.spec.collapse_coordinate(pt.depth);
        row.critical_field = critical_field(pt.spec.p_exponent);
        row.n_restarts = cfg.n_restarts;
        std::vector<OptimizationResult> ok;
        std::size_t n_failed = 0;
        std::string first_error;
        for (std::size_t r = 0; r < restarts; ++r) {
            const auto task = i * restarts + r;
            if (results[task]) {
                ok.push_back(std::move(*results[task]));
            } else {
                if (n_failed++ == 0) first_error = errors[task];
            }
        }
        const auto agg = aggregate(std::move(ok));
        row.residual = agg.residual;
        row.iterations = agg.iterations;
        row.annealing_time = agg.annealing_time;
        row.n_nonconverged = agg.n_nonconverged;
        if (n_failed > 0)
            row.status = "failed " + std::to_string(n_failed) + "/" + std::to_string(restarts) + ": " + first_error;
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg, bool depth_at_critical) {
    std::vector<SweepPoint> points;
    for (int p : cfg.p_grid)
        for (int n : cfg.n_grid)
            for (double h : cfg.h_grid)
                for (const auto& scheme : cfg.schemes) {
                    const ProblemSpec spec(n, p, h);
                    std::vector<int> depths = cfg.depth_grid;
                    if (depth_at_critical) {
                        depths = {spec.critical_depth()};
                    } else if (depths.empty()) {
                        for (int d = 1; d <= spec.critical_depth(); ++d) depths.push_back(d);
                    }
                    for (int d : depths) points.push_back({spec, d, scheme});
                }
    return points;
}

/// Residual against depth; an empty depth grid means 1..P* for each (N, p).
inline std::vector<SweepRow> run_scaling_experiment(const ExperimentConfig& cfg) {
    return run_sweep(sweep_points(cfg, false), cfg);
}

/// Residual against field at fixed depths, for each requested scheme.
inline std::vector<SweepRow> run_field_sweep(const ExperimentConfig& cfg) {
    if (cfg.depth_grid.empty()) throw std::invalid_argument("run_field_sweep: depth grid is empty");
    return run_sweep(sweep_points(cfg, false), cfg);
}

inline std::vector<ScalingPoint> scaling_points(const std::vector<SweepRow>& rows) {
    std::vector<ScalingPoint> out;
    for (const auto& r : rows) {
        if (r.failed()) continue;
        out.push_back({r.depth, ProblemSpec(r.n_sites, r.p_exponent, r.field).critical_depth(), r.residual.mean});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Iterations at the critical depth

struct IterationFit {
    int p_exponent = 0;
    double field = 0.0;
    std::string scheme;
    std::optional<LinearFit> fit;  // mean iterations against N
};

struct IterationScalingResult {
    std::vector<SweepRow> rows;
    std::vector<IterationFit> fits;
};

inline IterationScalingResult run_iteration_scaling(const ExperimentConfig& cfg) {
    IterationScalingResult out;
    out.rows = run_sweep(sweep_points(cfg, true), cfg);
    for (int p : cfg.p_grid)
        for (double h : cfg.h_grid)
            for (const auto& scheme : cfg.schemes) {
                IterationFit f{p, h, scheme, std::nullopt};
                std::vector<double> x, y;
                for (const auto& r : out.rows)
                    if (r.p_exponent == p && r.field == h && r.scheme == scheme && r.iterations.count > 0) {
                        x.push_back(r.n_sites);
                        y.push_back(r.iterations.mean);
                    }
                if (x.size() >= 2 && std::adjacent_find(x.begin(), x.end(), std::not_equal_to<>()) != x.end())
                    f.fit = fit_line(x, y);
                out.fits.push_back(std::move(f));
            }
    return out;
}

inline const std::string kIterationSchema =
    "N,p,h,P,scheme,n_restarts,mean_iters,std_iters,sem_iters,min_iters,max_iters,mean_residual,max_residual,"
    "n_nonconverged,fit_slope,fit_intercept,fit_r2,status";

inline Table iteration_table(const IterationScalingResult& res) {
    Table t(to_string(ExperimentKind::IterationScaling), split_schema(kIterationSchema));
    for (const auto& r : res.rows) {
        Cell slope, intercept, r2;
        for (const auto& f : res.fits)
            if (f.p_exponent == r.p_exponent && f.field == r.field && f.scheme == r.scheme && f.fit) {
                slope = f.fit->slope;
                intercept = f.fit->intercept;
                r2 = f.fit->r_squared;
            }
        t.add_row({std::int64_t{r.n_sites}, std::int64_t{r.p_exponent}, r.field, std::int64_t{r.depth}, r.scheme,
                   std::int64_t{r.n_restarts}, r.iterations.mean, r.iterations.std_dev, r.iterations.std_error,
                   r.iterations.min, r.iterations.max, r.residual.mean, r.residual.max, std::int64_t{r.n_nonconverged},
                   slope, intercept, r2, r.status});
    }
    return t;
}

// ---------------------------------------------------------------------------
// Exact depth-1 solutions

inline const std::string kNoClosedForm = "no closed form";

struct P1Row {
    int p_exponent = 0;
    int n_sites = 0;
    std::optional<AnglePair> angles;
    double fidelity = 0.0;
    double residual = 0.0;
    double annealing_time = 0.0;
    std::string status = "ok";
};

inline std::vector<P1Row> run_p1_table(const ExperimentConfig& cfg) {
    std::vector<P1Row> rows;
    for (int p : cfg.p_grid)
        for (int n : cfg.n_grid) {
            P1Row row{p, n, std::nullopt, 0.0, 0.0, 0.0, "ok"};
            try {
                row.angles = exact_p1_params(p, n);
                if (!row.angles) {
                    row.status = kNoClosedForm;
                } else {
                    const QaoaProblem problem(ProblemSpec(n, p, 0.0));
                    const auto rec = problem.evaluate(QaoaParams({row.angles->gamma}, {row.angles->beta}));
                    row.fidelity = rec.fidelity;
                    row.residual = rec.residual;
                    row.annealing_time = rec.annealing_time;
                }
            } catch (const std::exception& e) {
                row.angles.reset();
                row.status = std::string("failed: ") + e.what();
            }
            rows.push_back(std::move(row));
        }
    return rows;
}

inline const std::string kP1Schema = "p,N,gamma,beta,fidelity,residual,annealing_time,status";

inline Table p1_table(const std::vector<P1Row>& rows) {
    Table t(to_string(ExperimentKind::P1Table), split_schema(kP1Schema));
    for (const auto& r : rows) {
        if (r.angles)
            t.add_row({std::int64_t{r.p_exponent}, std::int64_t{r.n_sites}, r.angles->gamma, r.angles->beta, r.fidelity,
                       r.residual, r.annealing_time, r.status});
        else
            t.add_row({std::int64_t{r.p_exponent}, std::int64_t{r.n_sites}, {}, {}, {}, {}, {}, r.status});
    }
    return t;
}

// ---------------------------------------------------------------------------
// Minimal gap near the transition

struct GapMinimum {
    double field = 0.0;
    double gap = 0.0;
};

/// Minimizes dynamical_gap over `grid` (sorted ascending, at least 2 points),
/// then refines between the neighbours of the best grid point by golden
/// section search.
inline GapMinimum minimal_gap(int n_sites, int p, std::vector<double> grid, int refine_iters = 80) {
    if (grid.size() < 2) throw std::invalid_argument("minimal_gap: need at least 2 field values");
    std::sort(grid.begin(), grid.end());
    auto gap = [&](double h) { return dynamical_gap(ProblemSpec(n_sites, p, h)); };
    std::size_t best = 0;
    double best_gap = gap(grid[0]);
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (const double g = gap(grid[i]); g < best_gap) {
            best_gap = g;
            best = i;
        }
    double a = grid[best > 0 ? best - 1 : 0], b = grid[std::min(best + 1, grid.size() - 1)];
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - ratio * (b - a), d = a + ratio * (b - a);
    double gc = gap(c), gd = gap(d);
    for (int it = 0; it < refine_iters; ++it) {
        if (gc < gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - ratio * (b - a);
            gc = gap(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + ratio * (b - a);
            gd = gap(d);
        }
    }
    GapMinimum out{grid[best], best_gap};
    for (auto [h, g] : {std::pair{c, gc}, std::pair{d, gd}})
        if (g < out.gap) out = {h, g};
    return out;
}

/// Default scan window: [h_c - 1, h_c + 1] clipped at 0, 401 points.
inline std::vector<double> default_gap_window(int p) {
    const double hc = critical_field(p);
    const double lo = std::max(0.0, hc - 1.0), hi = hc + 1.0;
    std::vector<double> grid(401);
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = lo + (hi - lo) * static_cast<double>(i) / 400.0;
    return grid;
}

struct GapRow {
    int n_sites = 0;
    int p_exponent = 0;
    double critical_field = 0.0;
    GapMinimum minimum;
    std::string status = "ok";
};

struct GapFit {
    int p_exponent = 0;
    std::string model;  // "power": log gap vs log N; "exponential": log gap vs N
    std::optional<LinearFit> fit;
};

struct GapScalingResult {
    std::vector<GapRow> rows;
    std::vector<GapFit> fits;
};

inline GapScalingResult run_gap_scaling(const ExperimentConfig& cfg) {
    GapScalingResult out;
    for (int p : cfg.p_grid)
        for (int n : cfg.n_grid) out.rows.push_back({n, p, critical_field(p), {}, "ok"});
    parallel_for(out.rows.size(), cfg.workers, [&](std::size_t i) {
        auto& row = out.rows[i];
        try {
            row.minimum = minimal_gap(row.n_sites, row.p_exponent,
                                      cfg.h_grid.empty() ? default_gap_window(row.p_exponent) : cfg.h_grid);
        } catch (const std::exception& e) {
            row.status = std::string("failed: ") + e.what();
        }
    });
    for (int p : cfg.p_grid) {
        GapFit f{p, p == 2 ? "power" : "exponential", std::nullopt};
        std::vector<double> x, y;
        for (const auto& r : out.rows)
            if (r.p_exponent == p && r.status == "ok" && r.minimum.gap > 0.0) {
                x.push_back(p == 2 ? std::log(static_cast<double>(r.n_sites)) : static_cast<double>(r.n_sites));
                y.push_back(std::log(r.minimum.gap));
            }
        std::vector<double> distinct = x;
        std::sort(distinct.begin(), distinct.end());
        if (std::unique(distinct.begin(), distinct.end()) - distinct.begin() >= 2) f.fit = fit_line(x, y);
        out.fits.push_back(std::move(f));
    }
    return out;
}

inline const std::string kGapSchema = "N,p,h_c,h_min,min_gap,fit_model,fit_slope,fit_intercept,fit_r2,status";

inline Table gap_table(const GapScalingResult& res) {
    Table t(to_string(ExperimentKind::GapScaling), split_schema(kGapSchema));
    for (const auto& r : res.rows) {
        Cell model, slope, intercept, r2;
        for (const auto& f : res.fits)
            if (f.p_exponent == r.p_exponent) {
                model = f.model;
                if (f.fit) {
                    slope = f.fit->slope;
                    intercept = f.fit->intercept;
                    r2 = f.fit->r_squared;
                }
            }
        const bool ok = r.status == "ok";
        t.add_row({std::int64_t{r.n_sites}, std::int64_t{r.p_exponent}, r.critical_field,
                   ok ? Cell{r.minimum.field} : Cell{}, ok ? Cell{r.minimum.gap} : Cell{}, model, slope, intercept, r2,
                   r.status});
    }
    return t;
}

// ---------------------------------------------------------------------------

/// Runs the experiment named by cfg.kind and returns its table.
inline Table run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    switch (cfg.kind) {
        case ExperimentKind::Scaling: return sweep_table(run_scaling_experiment(cfg), to_string(cfg.kind));
        case ExperimentKind::FieldSweep: return sweep_table(run_field_sweep(cfg), to_string(cfg.kind));
        case ExperimentKind::IterationScaling: return iteration_table(run_iteration_scaling(cfg));
        case ExperimentKind::P1Table: return p1_table(run_p1_table(cfg));
        case ExperimentKind::GapScaling: return gap_table(run_gap_scaling(cfg));
    }
    throw std::logic_error("run_experiment: unhandled kind");
}

/// True when any row carries a failure status.
inline bool has_failures(const Table& t) {
    const auto col = t.column_index("status");
    for (const auto& row : t.rows)
        if (const auto* s = std::get_if<std::string>(&row[col]); s && s->rfind("failed", 0) == 0) return true;
    return false;
}

}  // namespace pspin
