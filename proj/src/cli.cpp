#include "pinchflow/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>

#include "pinchflow/convergence.hpp"
#include "pinchflow/curvature.hpp"
#include "pinchflow/parallel.hpp"
#include "pinchflow/pinching.hpp"
#include "pinchflow/report.hpp"
#include "pinchflow/simulator.hpp"

namespace pinchflow {

namespace {

// ----------------------------------------------------------------------------
// option plumbing
// ----------------------------------------------------------------------------

std::vector<double> parse_grid(const std::string& spec) {
    std::vector<double> out;
    if (spec.find(':') != std::string::npos) {
        double a, b, s;
        char c1, c2;
        std::istringstream is(spec);
        if (!(is >> a >> c1 >> b >> c2 >> s) || c1 != ':' || c2 != ':' || s <= 0.0)
            throw ValidationError("grid spec must be start:end:step");
        for (double v = a; v <= b + 1e-12; v += s) out.push_back(std::min(v, b));
    } else {
        std::istringstream is(spec);
        std::string tok;
        while (std::getline(is, tok, ',')) {
            if (!tok.empty()) out.push_back(std::stod(tok));
        }
    }
    if (out.empty()) throw ValidationError("empty grid spec");
    return out;
}

std::vector<int> parse_int_list(const std::string& spec) {
    std::vector<int> out;
    std::istringstream is(spec);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stoi(tok));
    }
    if (out.empty()) throw ValidationError("empty integer list");
    return out;
}

SymmetryMode parse_h_mode(const std::string& s) {
    if (s == "full_symmetric") return SymmetryMode::FullSymmetric;
    if (s == "unconstrained") return SymmetryMode::Unconstrained;
    throw ValidationError("h-mode must be full_symmetric or unconstrained");
}

PairingMode parse_pairing(const std::string& s) {
    if (s == "symplectic") return PairingMode::Symplectic;
    if (s == "free") return PairingMode::Free;
    throw ValidationError("mode must be symplectic or free");
}

SpaceKind parse_space(const std::string& s, int n, int m) {
    if (s == "grassmann") return SpaceKind::grassmann(n, m);
    if (s == "skew") return SpaceKind::skew(n);
    if (s == "sym") return SpaceKind::sym(n);
    if (s == "quadric") return SpaceKind::quadric(n);
    throw ValidationError("space must be grassmann|skew|sym|quadric");
}

void write_text_output(const std::string& path, const std::string& body) {
    if (path.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open output file " + path);
    out << body;
}

json flat_config(const std::map<std::string, std::string>& kv) {
    json j = json::object();
    for (const auto& [k, v] : kv) j[k] = v;
    return j;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

// ----------------------------------------------------------------------------
// subcommand payloads
// ----------------------------------------------------------------------------

struct ConstantsArgs {
    int N = 1;
    std::string mode = "symplectic";
    std::string h_mode = "full_symmetric";
    std::string grid = "1:4:0.5";
    int grid_per_axis = 9;
    double probe = 0.0;
    std::string out;
    std::string format = "csv";
};

int cmd_constants(const ConstantsArgs& a) {
    auto grid = parse_grid(a.grid);
    ConstantsReport rep = constants_report(a.N, parse_h_mode(a.h_mode), parse_pairing(a.mode),
                                           grid, a.grid_per_axis, a.probe);
    json config{{"command", "constants"}, {"N", a.N},       {"mode", a.mode},
                {"h_mode", a.h_mode},     {"grid", a.grid}, {"grid_per_axis", a.grid_per_axis}};
    if (a.format == "csv") {
        std::vector<std::vector<double>> rows;
        for (size_t i = 0; i < rep.lambda_grid.size(); ++i)
            rows.push_back({rep.lambda_grid[i], rep.delta_values[i]});
        std::ostringstream body;
        write_csv(body, config, {"Lambda", "delta_Lambda"}, rows);
        write_text_output(a.out, body.str());
        return 0;
    }
    if (a.format != "json") throw ValidationError("constants: format must be csv or json");
    json payload{{"N", rep.N},
                 {"lambda_grid", rep.lambda_grid},
                 {"delta_Lambda", rep.delta_values},
                 {"grid_resolution", rep.grid_resolutions},
                 {"lambda_prime", rep.lambda_prime_values},
                 {"lambda0",
                  {{"value", rep.lambda0_estimate.value},
                   {"unbounded", rep.lambda0_estimate.unbounded},
                   {"width", rep.lambda0_estimate.width}}},
                 {"lambda1",
                  {{"value", rep.lambda1_value.unbounded ? 0.0 : rep.lambda1_value.value},
                   {"unbounded", rep.lambda1_value.unbounded}}}};
    json doc = payload;
    doc["config"] = config;
    write_text_output(a.out, doc.dump(2) + "\n");
    return 0;
}

struct CurvatureArgs {
    std::string space = "grassmann";
    int n = 2, m = 2;
    int samples = 200;
    unsigned long long seed = 1;
    std::string out;
};

int cmd_curvature(const CurvatureArgs& a) {
    SpaceKind space = parse_space(a.space, a.n, a.m);
    ConditionReport rep = condition_report(space, a.samples, a.seed);
    json config{{"command", "curvature"}, {"space", a.space}, {"n", a.n},
                {"m", a.m},               {"samples", a.samples}, {"seed", a.seed}};
    json doc{{"space", space.name()},
             {"A_ok", rep.a_ok},
             {"A_max_deviation", rep.a_max_deviation},
             {"B_ok", rep.b_ok},
             {"B_max_value", rep.b_max_value},
             {"C_min_sampled", rep.c_min_sampled},
             {"C_lower_bound", rep.c_lower_bound}};
    if (space.family == SpaceFamily::GrassmannI) {
        bool gap_ok = true;
        const int nm = space.n * space.m;
        for (int i = 1; i <= nm && gap_ok; ++i)
            for (int j = 1; j <= nm && gap_ok; ++j)
                gap_ok = curvature_gap(space, i, j) == Rational(i == j ? 4 : 0);
        doc["gap_identity_ok"] = gap_ok;
    }
    doc["config"] = config;
    write_text_output(a.out, doc.dump(2) + "\n");
    return 0;
}

struct AppendixArgs {
    std::string out;
};

int cmd_appendix(const AppendixArgs& a) {
    GMax gm = maximize_g();
    json doc{{"alpha0", gm.alpha0}, {"g0", gm.g0}, {"x_star", critical_x()}};
    doc["config"] = json{{"command", "appendix"}};
    write_text_output(a.out, doc.dump(2) + "\n");
    return 0;
}

struct SimulateArgs {
    std::string kind = "shears";
    double eps = 0.1;
    int harmonics = 1;
    int L = 64;
    std::array<int, 4> A{1, 1, 0, 1};
    double t_end = 1.0;
    double dt_factor = 0.2;
    int stencil = 2;
    int record_every = 200;
    double stop_II2 = 0.0;
    std::string map_file;
    std::string save_map_path;
    std::string out;
    std::string svg;
    bool riccati = false;
};

int cmd_simulate(const SimulateArgs& a) {
    Timer timer;
    TorusMap map = [&] {
        if (!a.map_file.empty()) return load_map(a.map_file);
        if (a.kind == "identity") return make_map(MapKind::Identity, a.L);
        if (a.kind == "linear") return make_map(MapKind::Linear, a.L, a.A);
        if (a.kind == "shears")
            return make_map(MapKind::ComposedShears, a.L, {1, 0, 0, 1}, a.eps, a.harmonics);
        throw ValidationError("kind must be identity|linear|shears");
    }();
    if (!a.save_map_path.empty()) save_map(map, a.save_map_path);

    FlowConfig config;
    config.t_end = a.t_end;
    config.dt_factor = a.dt_factor;
    config.stencil_order = a.stencil;
    config.record_every = a.record_every;
    config.stop_II2 = a.stop_II2;

    json cfg{{"command", "simulate"}, {"kind", a.kind},        {"eps", a.eps},
             {"L", a.L},              {"t_end", a.t_end},      {"dt_factor", a.dt_factor},
             {"stencil", a.stencil},  {"record_every", a.record_every}};

    // Envelope setup: measured pinch capped at the largest feasible window.
    KLParams kl;
    double delta = 0.0;
    if (a.riccati) {
        FlowRecord r0 = monitors(map, a.stencil);
        const int n = 1;
        delta = delta_Lambda(std::max(r0.max_lambda, 1.0 + 1e-6), 1,
                             SymmetryMode::FullSymmetric, PairingMode::Symplectic, 5)
                    .value;
        const double hat = lambda_hat(delta, n);
        const double Lam = std::max(1.0 + 1e-6, std::min(r0.max_lambda, 0.999 * hat));
        kl = select_kl(Lam, delta, n, maximize_g().alpha0);
        if (!kl.feasible) throw NumericalError("InfeasibleKL: no admissible envelope window");
        config.monitor_log_k_l = std::make_pair(kl.log_k, kl.l);
    }

    FlowSeries series = run_flow(map, config);

    std::vector<std::vector<double>> rows;
    for (const auto& r : series.records)
        rows.push_back({r.t, r.min_star_omega, r.max_star_omega, r.max_lambda, r.max_II2,
                        r.det_drift});
    std::ostringstream body;
    write_csv(body, cfg,
              {"t", "min_star_omega", "max_star_omega", "max_lambda", "max_II2", "det_drift"},
              rows);
    write_text_output(a.out, body.str());

    json summary{{"records", series.records.size()},
                 {"steps", series.steps},
                 {"final_t", series.final_t},
                 {"initial_max_lambda", series.initial_max_lambda},
                 {"min_omega_monotone", series.min_omega_monotone},
                 {"worst_step_drop", series.worst_step_drop},
                 {"pinching_preserved", series.pinching_preserved}};
    double dd = 0.0;
    for (const auto& r : series.records) dd = std::max(dd, r.det_drift);
    summary["max_det_drift"] = dd;

    std::vector<PlotSeries> plot;
    if (a.riccati) {
        RiccatiComparison cmp = compare_to_riccati(series, kl);
        summary["riccati"] = json{{"K1", cmp.K1},
                                  {"y0", cmp.y0},
                                  {"envelope_valid", cmp.envelope_valid},
                                  {"dominated", cmp.dominated},
                                  {"worst_margin", cmp.worst_margin},
                                  {"k_log", kl.log_k},
                                  {"l", kl.l},
                                  {"Lambda_window", kl.Lambda},
                                  {"delta", delta}};
        PlotSeries meas{"measured g", {}, {}}, env{"riccati envelope", {}, {}};
        for (size_t q = 0; q < series.records.size(); ++q) {
            meas.x.push_back(series.records[q].t);
            meas.y.push_back(series.records[q].g_ratio);
            if (q < cmp.envelope.size()) {
                env.x.push_back(series.records[q].t);
                env.y.push_back(cmp.envelope[q]);
            }
        }
        plot.push_back(meas);
        plot.push_back(env);
    } else {
        PlotSeries ii2{"max |II|^2", {}, {}};
        for (const auto& r : series.records) {
            ii2.x.push_back(r.t);
            ii2.y.push_back(r.max_II2);
        }
        plot.push_back(ii2);
    }
    if (!a.svg.empty()) emit_plot_file(a.svg, cfg, plot, "mean curvature flow monitors", true);

    RunRecord rec;
    rec.config = cfg;
    rec.tool_version = tool_version();
    rec.wall_time_s = timer.seconds();
    rec.payload = summary;
    if (!a.out.empty()) std::cout << rec.to_json().dump(2) << "\n";
    return 0;
}

struct SweepArgs {
    std::string n_list = "1";
    std::string grid = "1:4:0.5";
    std::string mode = "symplectic";
    std::string h_mode = "full_symmetric";
    int grid_per_axis = 9;
    std::string out;
};

int cmd_sweep(const SweepArgs& a) {
    const auto ns = parse_int_list(a.n_list);
    const auto grid = parse_grid(a.grid);
    const SymmetryMode smode = parse_h_mode(a.h_mode);
    const PairingMode pmode = parse_pairing(a.mode);

    struct Cell {
        int N;
        double Lambda;
        double delta;
    };
    std::vector<Cell> cells;
    for (int N : ns)
        for (double L : grid) cells.push_back({N, L, 0.0});

    parallel_for(cells.size(), [&](size_t b, size_t e) {
        for (size_t q = b; q < e; ++q)
            cells[q].delta =
                delta_Lambda(cells[q].Lambda, cells[q].N, smode, pmode, a.grid_per_axis).value;
    });
    std::sort(cells.begin(), cells.end(), [](const Cell& x, const Cell& y) {
        return x.N != y.N ? x.N < y.N : x.Lambda < y.Lambda;
    });

    json config{{"command", "sweep"},   {"N_list", a.n_list}, {"grid", a.grid},
                {"mode", a.mode},       {"h_mode", a.h_mode}, {"grid_per_axis", a.grid_per_axis}};
    std::vector<std::vector<double>> rows;
    for (const auto& c : cells) rows.push_back({(double)c.N, c.Lambda, c.delta});
    std::ostringstream body;
    write_csv(body, config, {"N", "Lambda", "delta_Lambda"}, rows);
    write_text_output(a.out, body.str());
    return 0;
}

// ----------------------------------------------------------------------------
// config-file merge: flat JSON object, flags override
// ----------------------------------------------------------------------------

std::vector<std::string> merge_config_tokens(std::vector<std::string> args) {
    std::string config_path;
    for (size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw ValidationError("--config needs a file path");
            config_path = args[i + 1];
            args.erase(args.begin() + i, args.begin() + i + 2);
            break;
        }
    }
    if (config_path.empty()) return args;
    if (args.empty()) throw ValidationError("--config requires a subcommand");

    std::ifstream in(config_path);
    if (!in) throw ValidationError("cannot open config file " + config_path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("config file must hold a flat JSON object");

    std::vector<std::string> merged;
    merged.push_back(args[0]); // subcommand first
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.value().is_object() || it.value().is_array())
            throw ValidationError("config file fields must be strings or numbers");
        if (it.value().is_boolean()) {
            if (it.value().get<bool>()) merged.push_back("--" + it.key());
            continue;
        }
        merged.push_back("--" + it.key());
        if (it.value().is_string()) merged.push_back(it.value().get<std::string>());
        else merged.push_back(it.value().dump());
    }
    merged.insert(merged.end(), args.begin() + 1, args.end());
    return merged;
}

} // namespace

int run_command(const std::vector<std::string>& raw_args) {
    CLI::App app{"pinchflow: curvature algebra, pinching constants, and torus MCF runs"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    ConstantsArgs ca;
    auto* constants = app.add_subcommand("constants", "delta_Lambda table and constant chain");
    constants->add_option("--N", ca.N);
    constants->add_option("--mode", ca.mode);
    constants->add_option("--h-mode", ca.h_mode);
    constants->add_option("--Lambda-grid", ca.grid);
    constants->add_option("--grid-per-axis", ca.grid_per_axis);
    constants->add_option("--probe", ca.probe);
    constants->add_option("--out", ca.out);
    constants->add_option("--format", ca.format);

    CurvatureArgs cu;
    auto* curvature = app.add_subcommand("curvature", "condition report for a symmetric space");
    curvature->add_option("--space", cu.space);
    curvature->add_option("--n", cu.n);
    curvature->add_option("--m", cu.m);
    curvature->add_option("--samples", cu.samples);
    curvature->add_option("--seed", cu.seed);
    curvature->add_option("--out", cu.out);

    AppendixArgs ap;
    auto* appendix = app.add_subcommand("appendix", "alpha0, g0 and x* constants");
    appendix->add_option("--out", ap.out);

    SimulateArgs si;
    auto* simulate = app.add_subcommand("simulate", "graphical MCF on the flat 2-torus");
    simulate->add_option("--kind", si.kind);
    simulate->add_option("--eps", si.eps);
    simulate->add_option("--harmonics", si.harmonics);
    simulate->add_option("--L", si.L);
    simulate->add_option("--a11", si.A[0]);
    simulate->add_option("--a12", si.A[1]);
    simulate->add_option("--a21", si.A[2]);
    simulate->add_option("--a22", si.A[3]);
    simulate->add_option("--t-end", si.t_end);
    simulate->add_option("--dt-factor", si.dt_factor);
    simulate->add_option("--stencil", si.stencil);
    simulate->add_option("--record-every", si.record_every);
    simulate->add_option("--stop-II2", si.stop_II2);
    simulate->add_option("--map-file", si.map_file);
    simulate->add_option("--save-map", si.save_map_path);
    simulate->add_option("--out", si.out);
    simulate->add_option("--svg", si.svg);
    simulate->add_flag("--riccati", si.riccati);

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "parallel delta_Lambda sweep over (N, Lambda)");
    sweep->add_option("--N-list", sw.n_list);
    sweep->add_option("--Lambda-grid", sw.grid);
    sweep->add_option("--mode", sw.mode);
    sweep->add_option("--h-mode", sw.h_mode);
    sweep->add_option("--grid-per-axis", sw.grid_per_axis);
    sweep->add_option("--out", sw.out);

    try {
        auto args = merge_config_tokens(raw_args);
        // CLI11 parses reversed token vectors.
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
        if (constants->parsed()) return cmd_constants(ca);
        if (curvature->parsed()) return cmd_curvature(cu);
        if (appendix->parsed()) return cmd_appendix(ap);
        if (simulate->parsed()) return cmd_simulate(si);
        if (sweep->parsed()) return cmd_sweep(sw);
        std::cerr << app.help() << std::endl;
        return 1;
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp") {
            std::cout << app.help() << std::endl;
            return 0;
        }
        std::cerr << e.what() << "\n" << app.help() << std::endl;
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << std::endl;
        return 2;
    }
}

} // namespace pinchflow
