#include "firefit/app.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

#include "firefit/field_io.hpp"
#include "firefit/io.hpp"

namespace firefit::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <class F>
auto validated(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception& e) {
        throw ValidationError(e.what());
    }
}

const json& section(const json& cfg, const char* name) {
    static const json empty = json::object();
    if (!cfg.contains(name)) return empty;
    const json& s = cfg.at(name);
    if (!s.is_object()) throw ValidationError(std::string("config section '") + name + "' must be an object");
    return s;
}

template <class T>
T value_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    return j.at(key).get<T>();
}

std::size_t as_count(const json& v, const char* key) {
    if (!v.is_number_unsigned()) {
        throw ValidationError(std::string("'") + key + "' must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

std::size_t count_or(const json& j, const char* key, std::size_t fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    return as_count(j.at(key), key);
}

std::vector<std::size_t> counts_of(const json& j, const char* key) {
    if (!j.at(key).is_array()) throw ValidationError(std::string("'") + key + "' must be a list");
    std::vector<std::size_t> out;
    for (const auto& v : j.at(key)) out.push_back(as_count(v, key));
    return out;
}

fs::path resolve(const Options& opts, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : opts.base_dir / path;
}

Grid parse_grid(const json& g) {
    return make_grid(count_or(g, "nx", 100), count_or(g, "ny", 100),
                     value_or<double>(g, "dx", 1.0), value_or<double>(g, "dy", 1.0),
                     value_or<double>(g, "x0", 0.0), value_or<double>(g, "y0", 0.0));
}

json grid_json(const Grid& g) {
    return {{"nx", g.nx}, {"ny", g.ny}, {"dx", g.dx}, {"dy", g.dy}, {"x0", g.x0}, {"y0", g.y0}};
}

ScalarField field_or_constant(const Options& opts, const json& v, const Grid& grid) {
    if (v.is_number()) return ScalarField(grid, v.get<double>());
    ScalarField f = load_field(resolve(opts, v.get<std::string>()));
    require_same_grid(grid, f.grid(), "rothermel input");
    return f;
}

/// Grid from the "grid" section, else from the rate field file.
Grid config_grid(const Options& opts) {
    const json& cfg = opts.config;
    if (cfg.contains("grid")) return parse_grid(section(cfg, "grid"));
    const json& ros = section(cfg, "ros");
    if (value_or<std::string>(ros, "type", "") == "field") {
        return load_field(resolve(opts, ros.at("path").get<std::string>())).grid();
    }
    throw ValidationError("config needs a grid section or a field-backed ros section");
}

RosModel parse_ros(const Options& opts, const Grid& grid) {
    const json& ros = section(opts.config, "ros");
    const double floor = value_or<double>(opts.config, "rate_floor", kDefaultRateFloor);
    const auto type = value_or<std::string>(ros, "type", "");
    if (type == "uniform") return RosModel::uniform(grid, ros.at("rate").get<double>(), floor);
    if (type == "sectored") {
        const auto c = ros.at("center").get<std::vector<double>>();
        if (c.size() != 2) throw ValidationError("ros.center needs two coordinates");
        return RosModel::sectored(grid,
                                  SectorSpec{c[0], c[1], ros.at("boundaries").get<std::vector<double>>(),
                                             ros.at("rates").get<std::vector<double>>()},
                                  floor);
    }
    if (type == "field") {
        ScalarField f = load_field(resolve(opts, ros.at("path").get<std::string>()));
        require_same_grid(grid, f.grid(), "ros field");
        return RosModel::field(std::move(f), floor);
    }
    if (type == "rothermel") {
        RosModel::RothermelField in{field_or_constant(opts, ros.at("r0"), grid),
                                    field_or_constant(opts, ros.value("phi_w", json(0.0)), grid),
                                    field_or_constant(opts, ros.value("phi_s", json(0.0)), grid),
                                    std::nullopt, std::nullopt};
        return RosModel::rothermel(std::move(in), floor);
    }
    throw ValidationError("ros.type must be one of uniform, sectored, field, rothermel");
}

SmootherConfig parse_smoother(const json& s) {
    SmootherConfig c;
    c.alpha = value_or<double>(s, "alpha", c.alpha);
    c.rho = value_or<double>(s, "rho", c.rho);
    c.pcg_tol = value_or<double>(s, "pcg_tol", c.pcg_tol);
    c.pcg_maxit = count_or(s, "pcg_maxit", c.pcg_maxit);
    c.validate();
    return c;
}

ObjectiveConfig parse_objective(const json& o) {
    ObjectiveConfig c;
    const auto v = value_or<std::string>(o, "f_variant", "product");
    if (v == "product") {
        c.variant = ResidualVariant::product;
    } else if (v == "difference") {
        c.variant = ResidualVariant::difference;
    } else {
        throw ValidationError("objective.f_variant must be product or difference");
    }
    c.p = value_or<double>(o, "p", c.p);
    if (o.contains("penalty_weight") && !o.at("penalty_weight").is_null()) {
        c.penalty_weight = o.at("penalty_weight").get<double>();
    }
    c.validate();
    return c;
}

LevelSchedule parse_schedule(const json& s) {
    LevelSchedule c;
    c.coarsest_step = count_or(s, "coarsest_step", c.coarsest_step);
    c.cycles = count_or(s, "cycles", c.cycles);
    if (s.contains("sweeps")) {
        c.sweeps = counts_of(s, "sweeps");
    } else {
        c.sweeps.clear();
        for (std::size_t st = c.coarsest_step, n = 1; st >= 1; st /= 2, ++n) c.sweeps.push_back(n);
    }
    if (s.contains("bracket_scale") && !s.at("bracket_scale").is_null()) {
        c.bracket_scale = s.at("bracket_scale").get<double>();
    }
    c.validate();
    return c;
}

DetectionConfig parse_detection(const json& d) {
    DetectionConfig c;
    c.sigma = value_or<double>(d, "sigma", c.sigma);
    c.a = value_or<double>(d, "a", c.a);
    c.b = value_or<double>(d, "b", c.b);
    c.p_false = value_or<double>(d, "p_false", c.p_false);
    c.p_max = value_or<double>(d, "p_max", c.p_max);
    c.tau = value_or<double>(d, "tau", c.tau);
    c.lambda = value_or<double>(d, "lambda", c.lambda);
    c.validate();
    return c;
}

json detection_json(const DetectionConfig& c) {
    return {{"sigma", c.sigma}, {"a", c.a},       {"b", c.b},          {"p_false", c.p_false},
            {"p_max", c.p_max}, {"tau", c.tau},   {"lambda", c.lambda}};
}

std::vector<Perimeter> load_perimeters(const Options& opts) {
    const json& cfg = opts.config;
    if (!cfg.contains("perimeters") || !cfg.at("perimeters").is_array()) {
        throw ValidationError("config needs a perimeters list of CSV paths");
    }
    std::vector<Perimeter> all;
    for (const auto& p : cfg.at("perimeters")) {
        auto some = read_perimeters_csv(resolve(opts, p.get<std::string>()));
        for (auto& per : some) all.push_back(std::move(per));
    }
    if (all.empty()) throw ValidationError("at least one perimeter constraint is required");
    return all;
}

/// First single-point perimeter sitting exactly on a node.
std::optional<std::size_t> ignition_node(const Grid& g, const std::vector<Perimeter>& pers) {
    for (const auto& p : pers) {
        if (p.points.size() != 1) continue;
        const auto tp = locate_point(g, p.points[0].x, p.points[0].y);
        for (int n = 0; n < 3; ++n) {
            if (tp.weights[n] == 1.0) return tp.nodes[n];
        }
    }
    return std::nullopt;
}

std::uint64_t seed_of(const Options& opts) {
    if (opts.seed) return *opts.seed;
    return value_or<std::uint64_t>(opts.config, "seed", 0);
}

void make_out_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

template <class F>
fs::path write_file(const fs::path& path, F&& writer) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    writer(os);
    if (!os) throw IoError("failed writing " + path.string());
    return path;
}

std::string alpha_tag(double a) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << a;
    return s.str();
}

}  // namespace

Options load_options(const std::optional<fs::path>& config_path,
                     const std::vector<std::string>& overrides) {
    Options opts;
    if (config_path) {
        std::ifstream is(*config_path);
        if (!is) throw ValidationError("file not found: " + config_path->string());
        try {
            opts.config = json::parse(is);
        } catch (const json::exception& e) {
            throw ValidationError("cannot parse " + config_path->string() + ": " + e.what());
        }
        if (!opts.config.is_object()) throw ValidationError("config root must be an object");
        opts.base_dir = config_path->parent_path();
        if (opts.base_dir.empty()) opts.base_dir = ".";
    }
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ValidationError("override must look like section.key=value: " + o);
        }
        json value;
        try {
            value = json::parse(o.substr(eq + 1));
        } catch (const json::exception&) {
            value = o.substr(eq + 1);
        }
        std::string ptr = "/" + o.substr(0, eq);
        for (auto& ch : ptr) if (ch == '.') ch = '/';
        opts.config[json::json_pointer(ptr)] = value;
    }
    if (opts.config.contains("output_dir")) {
        opts.out_dir = resolve(opts, opts.config.at("output_dir").get<std::string>());
    }
    return opts;
}

GenCaseResult cmd_gen_case(const Options& opts) {
    struct Plan {
        ConcentricSpec spec;
        bool detections = false;
        std::size_t count = 200;
        double t_lo = 0.0, t_hi = 0.0;
        DetectionConfig dcfg;
    };
    const Plan plan = validated([&] {
        Plan p;
        const json& cfg = opts.config;
        if (cfg.contains("grid")) p.spec.grid = parse_grid(section(cfg, "grid"));
        const json& c = section(cfg, "case");
        if (c.contains("center")) {
            const auto ctr = c.at("center").get<std::vector<double>>();
            if (ctr.size() != 2) throw ValidationError("case.center needs two coordinates");
            p.spec.cx = ctr[0];
            p.spec.cy = ctr[1];
        } else {
            p.spec.cx = p.spec.grid.x(p.spec.grid.nx / 2);
            p.spec.cy = p.spec.grid.y(p.spec.grid.ny / 2);
        }
        p.spec.ignition_time = value_or<double>(c, "ignition_time", 0.0);
        p.spec.sector_boundaries = value_or<std::vector<double>>(c, "sector_boundaries", {});
        p.spec.sector_rates = value_or<std::vector<double>>(c, "sector_rates", {});
        if (c.contains("sectors") && p.spec.sector_rates.empty()) {
            p.spec.sector_rates = default_sector_rates(as_count(c.at("sectors"), "sectors"));
        }
        p.spec.times = value_or<std::vector<double>>(c, "times", p.spec.times);
        p.spec.radii = value_or<std::vector<double>>(c, "radii", {});
        p.spec.points_per_circle = count_or(c, "points_per_circle", 128);
        p.spec.resolve();
        if (cfg.contains("detections")) {
            const json& d = section(cfg, "detections");
            p.detections = true;
            p.count = count_or(d, "count", 200);
            const auto tr = value_or<std::vector<double>>(d, "t_range", {p.spec.ignition_time, p.spec.times[1]});
            if (tr.size() != 2 || !(tr[0] <= tr[1])) throw ValidationError("detections.t_range must be [lo, hi]");
            p.t_lo = tr[0];
            p.t_hi = tr[1];
            json dj = section(cfg, "detection");
            if (!dj.contains("sigma")) dj["sigma"] = 2.0 * std::max(p.spec.grid.dx, p.spec.grid.dy);
            if (!dj.contains("tau")) dj["tau"] = 0.5 * p.spec.times.back();
            p.dcfg = parse_detection(dj);
        }
        return p;
    });

    GenCaseResult out{{}, make_concentric_case(plan.spec)};
    const ConcentricCase& cs = out.data;
    std::vector<DetectionRecord> recs;
    if (plan.detections) {
        recs = sample_detections(cs.exact, plan.count, plan.t_lo, plan.t_hi, plan.dcfg, seed_of(opts));
    }
    make_out_dir(opts.out_dir);
    out.files.push_back(save_field(opts.out_dir / "ros.asc", cs.rates));
    out.files.push_back(save_field(opts.out_dir / "exact.asc", cs.exact));
    out.files.push_back(write_file(opts.out_dir / "perimeters.csv",
                                   [&](std::ostream& os) { write_perimeters_csv(os, cs.perimeters); }));
    json next = {
        {"grid", grid_json(cs.spec.grid)},
        {"perimeters", {"perimeters.csv"}},
        {"ros", {{"type", "field"}, {"path", out.files[0].filename().string()}}},
        {"exact", out.files[1].filename().string()},
        {"smoother", {{"alpha", 1.4}, {"alphas", {1.0, 1.1, 1.2, 1.3, 1.4}}}},
        {"objective", {{"f_variant", "product"}, {"p", 2.0}}},
        {"schedule", {{"coarsest_step", 32}, {"cycles", 4}, {"sweeps", {1, 2, 3, 4, 5, 6}}}},
    };
    if (plan.detections) {
        out.files.push_back(write_file(opts.out_dir / "detections.csv",
                                       [&](std::ostream& os) { write_detections_csv(os, recs); }));
        json d = detection_json(plan.dcfg);
        d["path"] = "detections.csv";
        next["detection"] = d;
        const double half = 0.25 * std::min(cs.spec.grid.x_max() - cs.spec.grid.x0,
                                            cs.spec.grid.y_max() - cs.spec.grid.y0);
        next["ignition"] = {{"x_range", {cs.spec.cx - half, cs.spec.cx + half}},
                            {"y_range", {cs.spec.cy - half, cs.spec.cy + half}},
                            {"nx", 5}, {"ny", 5}, {"times", {cs.spec.ignition_time}}};
    }
    out.files.push_back(write_file(opts.out_dir / "case.json",
                                   [&](std::ostream& os) { os << std::setw(2) << next << '\n'; }));
    return out;
}

InitResult cmd_init(const Options& opts) {
    struct Plan {
        Grid grid;
        std::vector<Perimeter> perimeters;
        SmootherConfig smoother;
        std::vector<double> alphas;
        bool force = false;
    };
    const Plan plan = validated([&] {
        Plan p;
        p.grid = config_grid(opts);
        p.perimeters = load_perimeters(opts);
        const json& s = section(opts.config, "smoother");
        p.smoother = parse_smoother(s);
        p.alphas = value_or<std::vector<double>>(s, "alphas", {p.smoother.alpha});
        p.force = value_or<bool>(s, "force", false);
        if (p.alphas.empty()) throw ValidationError("smoother.alphas is empty");
        for (double a : p.alphas) {
            if (!(a > 0.0) || (a < 1.0 && !p.force)) {
                throw ValidationError("alpha below 1 needs smoother.force = true");
            }
        }
        return p;
    });
    const auto cs = build_constraints(plan.grid, plan.perimeters);
    const auto ign = ignition_node(plan.grid, plan.perimeters);
    InitResult out;
    for (double a : plan.alphas) {
        const SpectralOperator S(plan.grid, a, plan.force);
        SmootherConfig cfg = plan.smoother;
        cfg.alpha = a;
        auto f = solve_initial(cs, S, cfg);
        const double funnel = ign ? funnel_metric(f.T, *ign) : std::numeric_limits<double>::quiet_NaN();
        out.runs.push_back({a, std::move(f), funnel, {}});
    }
    make_out_dir(opts.out_dir);
    for (auto& r : out.runs) {
        r.file = save_field(opts.out_dir / ("init_alpha_" + alpha_tag(r.alpha) + ".asc"), r.field.T);
    }
    write_file(opts.out_dir / "init_report.csv", [&](std::ostream& os) {
        os << std::setprecision(17) << "alpha,iterations,converged,violation,funnel\n";
        for (const auto& r : out.runs) {
            os << r.alpha << ',' << r.field.iterations << ',' << (r.field.converged ? 1 : 0) << ','
               << r.field.violation << ',' << r.funnel << '\n';
        }
    });
    return out;
}

FitOutput cmd_fit(const Options& opts) {
    struct Plan {
        Grid grid;
        std::vector<Perimeter> perimeters;
        std::optional<RosModel> ros;
        SmootherConfig smoother;
        ObjectiveConfig objective;
        LevelSchedule schedule;
        std::optional<ScalarField> exact;
    };
    const Plan plan = validated([&] {
        Plan p;
        p.grid = config_grid(opts);
        p.perimeters = load_perimeters(opts);
        p.ros = parse_ros(opts, p.grid);
        p.smoother = parse_smoother(section(opts.config, "smoother"));
        p.objective = parse_objective(section(opts.config, "objective"));
        p.schedule = parse_schedule(section(opts.config, "schedule"));
        if (opts.config.contains("exact")) {
            p.exact = load_field(resolve(opts, opts.config.at("exact").get<std::string>()));
            require_same_grid(p.grid, p.exact->grid(), "exact field");
        }
        return p;
    });
    const auto cs = build_constraints(plan.grid, plan.perimeters);
    const SpectralOperator S(plan.grid, plan.smoother.alpha);
    FitOutput out{solve_initial(cs, S, plan.smoother), {}, {}, {}, {}};
    out.fit = multiscale_fit(out.initial.T, cs, *plan.ros, plan.objective, plan.schedule);
    if (plan.exact) {
        auto rel_rms = [&](const ScalarField& T) {
            double num = 0.0, den = 0.0;
            for (std::size_t k = 0; k < T.size(); ++k) {
                num += std::pow(T[k] - (*plan.exact)[k], 2);
                den += std::pow((*plan.exact)[k], 2);
            }
            return std::sqrt(num / den);
        };
        out.initial_error = rel_rms(out.initial.T);
        out.final_error = rel_rms(out.fit.T);
    }
    make_out_dir(opts.out_dir);
    out.files.push_back(save_field(opts.out_dir / "initial.asc", out.initial.T));
    out.files.push_back(save_field(opts.out_dir / "fit.asc", out.fit.T));
    out.files.push_back(write_file(opts.out_dir / "fit_report.csv", [&](std::ostream& os) {
        write_fit_report_csv(os, out.fit.report);
    }));
    const auto& rep = out.fit.report;
    json summary = {
        {"initial_objective", rep.initial_objective},
        {"final_objective", rep.history.empty() ? rep.initial_objective : rep.history.back().objective},
        {"line_searches", rep.history.size()},
        {"accepted", rep.accepted},
        {"skipped_directions", rep.skipped_directions},
        {"max_violation", rep.max_violation},
        {"final_violation", rep.final_violation},
        {"pcg_iterations", out.initial.iterations},
    };
    if (out.final_error) {
        summary["initial_relative_rms"] = *out.initial_error;
        summary["final_relative_rms"] = *out.final_error;
    }
    out.files.push_back(write_file(opts.out_dir / "fit_summary.json", [&](std::ostream& os) {
        os << std::setprecision(17) << std::setw(2) << summary << '\n';
    }));
    return out;
}

IgnitionResult cmd_ignition(const Options& opts) {
    struct Plan {
        std::optional<RosModel> ros;
        std::vector<DetectionRecord> recs;
        DetectionConfig dcfg;
        std::vector<IgnitionCandidate> candidates;
    };
    const Plan plan = validated([&] {
        Plan p;
        const Grid grid = config_grid(opts);
        p.ros = parse_ros(opts, grid);
        const json& d = section(opts.config, "detection");
        p.dcfg = parse_detection(d);
        if (d.contains("path")) p.recs = read_detections_csv(resolve(opts, d.at("path").get<std::string>()));
        const json& lat = section(opts.config, "ignition");
        const auto xr = value_or<std::vector<double>>(lat, "x_range", {grid.x0, grid.x_max()});
        const auto yr = value_or<std::vector<double>>(lat, "y_range", {grid.y0, grid.y_max()});
        if (xr.size() != 2 || yr.size() != 2) throw ValidationError("ignition ranges need [lo, hi]");
        const auto times = value_or<std::vector<double>>(lat, "times", {0.0});
        p.candidates = candidate_lattice(xr[0], xr[1], count_or(lat, "nx", 5), yr[0], yr[1],
                                         count_or(lat, "ny", 5), times);
        for (const auto& c : p.candidates) {
            if (!grid.contains(c.x, c.y)) throw ValidationError("ignition lattice leaves the grid");
        }
        return p;
    });
    IgnitionResult out;
    out.ranked = ignition_search(plan.candidates, plan.recs, *plan.ros, plan.dcfg);
    make_out_dir(opts.out_dir);
    out.file = write_file(opts.out_dir / "ignition.csv",
                          [&](std::ostream& os) { write_ignition_csv(os, out.ranked); });
    return out;
}

int run(int argc, char** argv) {
    CLI::App cli{"Fire arrival time fitting between observed perimeters"};
    cli.require_subcommand(1);
    struct Common {
        std::optional<std::string> config;
        std::optional<std::string> out;
        std::optional<std::uint64_t> seed;
        std::vector<std::string> overrides;
    };
    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config, "JSON configuration file");
        sub->add_option("--out", common.out, "output directory");
        sub->add_option("--seed", common.seed, "random seed for synthetic detections");
        sub->add_option("--set", common.overrides, "override a config key: section.key=value");
    };
    std::function<int(const Options&)> action;
    auto* gen = cli.add_subcommand("gen-case", "generate the concentric-circles case");
    add_common(gen);
    gen->callback([&] {
        action = [](const Options& o) {
            const auto r = cmd_gen_case(o);
            for (const auto& f : r.files) std::cout << "wrote " << f.string() << '\n';
            return 0;
        };
    });
    auto* init = cli.add_subcommand("init", "fractional-Laplacian initial arrival time");
    add_common(init);
    init->callback([&] {
        action = [](const Options& o) {
            const auto r = cmd_init(o);
            for (const auto& run : r.runs) {
                std::cout << "alpha " << run.alpha << ": " << run.field.iterations
                          << " PCG iterations, funnel " << run.funnel << ", wrote "
                          << run.file.string() << '\n';
                if (!run.field.warning.empty()) std::cerr << "warning: " << run.field.warning << '\n';
            }
            return 0;
        };
    });
    auto* fit = cli.add_subcommand("fit", "initialize and run the multiscale residual fit");
    add_common(fit);
    fit->callback([&] {
        action = [](const Options& o) {
            const auto r = cmd_fit(o);
            const auto& rep = r.fit.report;
            if (!r.initial.warning.empty()) std::cerr << "warning: " << r.initial.warning << '\n';
            std::cout << "objective " << rep.initial_objective << " -> "
                      << (rep.history.empty() ? rep.initial_objective : rep.history.back().objective)
                      << " over " << rep.history.size() << " line searches in " << rep.seconds
                      << " s, max violation " << rep.max_violation << '\n';
            if (r.final_error) {
                std::cout << "relative RMS vs exact: " << *r.initial_error << " -> " << *r.final_error
                          << '\n';
            }
            return 0;
        };
    });
    auto* ign = cli.add_subcommand("ignition", "rank ignition candidates by detection likelihood");
    add_common(ign);
    ign->callback([&] {
        action = [](const Options& o) {
            const auto r = cmd_ignition(o);
            if (!r.ranked.empty()) {
                const auto& b = r.ranked.front();
                std::cout << "best ignition (" << b.candidate.x << ", " << b.candidate.y << ") at t = "
                          << b.candidate.t << ", loglik " << b.log_likelihood << '\n';
            }
            std::cout << "wrote " << r.file.string() << '\n';
            return 0;
        };
    });

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? 0 : 2;
    }
    Options opts;
    try {
        std::optional<fs::path> cfg;
        if (common.config) cfg = fs::path(*common.config);
        opts = load_options(cfg, common.overrides);
        if (common.out) opts.out_dir = *common.out;
        opts.seed = common.seed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    try {
        return action(opts);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace firefit::app
