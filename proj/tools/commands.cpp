#include "commands.hpp"

#include "lzsm/analytic.hpp"
#include "lzsm/errors.hpp"
#include "lzsm/io.hpp"
#include "lzsm/sweep.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

namespace lzsm::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kMilli = 1e-3;

double require_value(const std::optional<double>& flag, bool use_defaults, double default_value,
                     const char* name) {
    if (flag) {
        return *flag;
    }
    if (use_defaults) {
        return default_value;
    }
    throw UsageError(std::string("missing --") + name + " (or pass --paper-defaults)");
}

void require(bool ok, const std::string& reason) {
    if (!ok) {
        throw UsageError(reason);
    }
}

void require_finite(double v, const char* name) {
    require(std::isfinite(v), std::string("--") + name + " must be finite");
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

void prepare_out_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw UsageError("output directory " + dir.string() + " is not writable");
    }
}

Manifest base_manifest(const std::string& command, const RunConfig& config,
                       const ModelParams& params) {
    Manifest m;
    m.add("command", command);
    m.add("config", config.config_path ? config.config_path->string() : std::string("(none)"));
    m.add("paper_defaults", config.paper_defaults ? "true" : "false");
    m.add("threads", static_cast<double>(config.threads));
    m.add("seed", static_cast<double>(config.seed));
    m.add("steps_per_period", static_cast<double>(config.integrator.steps_per_period));
    m.add("tolerance", config.integrator.tolerance);
    m.add("adaptive", config.integrator.adaptive ? "true" : "false");
    const ModelConfig& c = params.config();
    m.add("delta0_ghz", c.delta0_ghz);
    m.add("alpha_h_ghz_per_nm", c.alpha_h_ghz_per_nm);
    m.add("alpha_f24_ghz_per_nm", c.alpha_f24_ghz_per_nm);
    m.add("lever_arm_nm_per_v", c.lever_arm_nm_per_v);
    m.add("epsilon_offset_ghz", c.epsilon_offset_ghz);
    m.add("quad_bias_ghz_per_nm2", c.quad_bias_ghz_per_nm2);
    m.add("tunneling_modulation", c.tunneling_modulation ? "true" : "false");
    m.add("kappa_ghz_per_v", params.kappa());
    return m;
}

void validate_run_config(const RunConfig& config) {
    require(config.threads >= 1, "--threads must be >= 1");
    require(config.integrator.steps_per_period >= 32, "--steps-per-period must be >= 32");
    require(config.integrator.tolerance > 0.0, "--tolerance must be positive");
}

std::string pulse_label(double t_pump) {
    return std::isinf(t_pump) ? std::string("cw") : "tpump_" + io::format_number(t_pump) + "ns";
}

}  // namespace

void Manifest::add(const std::string& key, const std::string& value) {
    entries_.emplace_back(key, value);
}

void Manifest::add(const std::string& key, double value) {
    entries_.emplace_back(key, io::format_number(value));
}

void Manifest::write(const fs::path& path) const {
    auto out = open_output(path);
    for (const auto& [key, value] : entries_) {
        out << key << '=' << value << '\n';
    }
}

ModelParams resolve_model(const RunConfig& config) {
    if (config.config_path) {
        try {
            return io::load_model_config(*config.config_path, io::fe_mgo_model_config());
        } catch (const DomainError& e) {
            throw UsageError(std::string("config: ") + e.what());
        }
    }
    if (config.paper_defaults) {
        return ModelParams::fe_mgo();
    }
    throw UsageError("no model parameters: pass --config FILE or --paper-defaults");
}

int cmd_levels(const RunConfig& config, const LevelsArgs& args, std::ostream& log) {
    validate_run_config(config);
    const ModelParams params = resolve_model(config);
    require_finite(args.vmin_mv, "vmin-mv");
    require_finite(args.vmax_mv, "vmax-mv");
    require(args.vmax_mv > args.vmin_mv, "--vmax-mv must exceed --vmin-mv");
    require(args.points >= 2, "--points must be >= 2");
    prepare_out_dir(config.out_dir);

    const auto axis = linspace(args.vmin_mv * kMilli, args.vmax_mv * kMilli,
                               static_cast<std::size_t>(args.points));
    auto csv = open_output(config.out_dir / "levels.csv");
    io::write_levels_csv(csv, params, axis);

    Manifest m = base_manifest("levels", config, params);
    m.add("vmin_mv", args.vmin_mv);
    m.add("vmax_mv", args.vmax_mv);
    m.add("points", static_cast<double>(args.points));
    m.add("output", "levels.csv");
    m.write(config.out_dir / "run.txt");
    log << "wrote " << (config.out_dir / "levels.csv").string() << '\n';
    return 0;
}

int cmd_trace(const RunConfig& config, const TraceArgs& args, std::ostream& log) {
    validate_run_config(config);
    const ModelParams params = resolve_model(config);
    const bool use_defaults = config.paper_defaults;
    const double vdc_mv = require_value(args.vdc_mv, use_defaults, 150.0, "vdc-mv");
    const double vrf_mv = require_value(args.vrf_mv, use_defaults, 260.0, "vrf-mv");
    const double f = require_value(args.f_ghz, use_defaults, 10.0 * params.delta0(), "f-ghz");
    std::vector<double> tpumps = args.tpump_ns;
    if (tpumps.empty()) {
        tpumps.push_back(std::numeric_limits<double>::infinity());
    }
    require_finite(vdc_mv, "vdc-mv");
    require(std::isfinite(vrf_mv) && vrf_mv >= 0.0, "--vrf-mv must be finite and >= 0");
    require(std::isfinite(f) && f > 0.0, "--f-ghz must be positive");
    for (const double t : tpumps) {
        require(t >= 0.0 && !std::isnan(t), "--tpump-ns must be >= 0 (inf for continuous wave)");
    }
    require(std::isfinite(args.tend_ns) && args.tend_ns > 0.0, "--tend-ns must be positive");
    require(args.sample_ns >= 0.0, "--sample-ns must be >= 0");
    prepare_out_dir(config.out_dir);

    IntegratorOptions opts = config.integrator;
    opts.sample_interval_ns = args.sample_ns;
    const auto trajectories =
        pulse_trace(params, vdc_mv * kMilli, vrf_mv * kMilli, f, tpumps, args.tend_ns, opts);

    Manifest m = base_manifest("trace", config, params);
    m.add("vdc_mv", vdc_mv);
    m.add("vrf_mv", vrf_mv);
    m.add("f_ghz", f);
    m.add("tend_ns", args.tend_ns);
    m.add("sample_ns", args.sample_ns > 0.0 ? args.sample_ns : 1.0 / (20.0 * f));
    for (std::size_t k = 0; k < trajectories.size(); ++k) {
        const std::string name = "trace_" + pulse_label(tpumps[k]) + ".csv";
        auto csv = open_output(config.out_dir / name);
        io::write_trajectory_csv(csv, trajectories[k]);
        m.add("tpump_ns", io::format_number(tpumps[k]));
        m.add("output", name);
        log << "wrote " << (config.out_dir / name).string() << '\n';
    }
    m.write(config.out_dir / "run.txt");
    return 0;
}

int cmd_scan(const RunConfig& config, const ScanArgs& args, std::ostream& log) {
    validate_run_config(config);
    const ModelParams params = resolve_model(config);
    const bool use_defaults = config.paper_defaults;
    const double vrf_mv = require_value(args.vrf_mv, use_defaults, 200.0, "vrf-mv");
    const double f = require_value(args.f_ghz, use_defaults, 10.0 * params.delta0(), "f-ghz");
    const double tpump = require_value(args.tpump_ns, use_defaults, 0.9 / params.delta0(), "tpump-ns");
    require(std::isfinite(args.vmin_mv) && std::isfinite(args.vmax_mv) && args.vmin_mv < 0.0 &&
                args.vmax_mv > 0.0,
            "--vmin-mv must be < 0 < --vmax-mv");
    require(args.points >= 3, "--points must be >= 3");
    require(std::isfinite(vrf_mv) && vrf_mv >= 0.0, "--vrf-mv must be finite and >= 0");
    require(std::isfinite(f) && f > 0.0, "--f-ghz must be positive");
    require(std::isfinite(tpump) && tpump > 0.0, "--tpump-ns must be positive");
    prepare_out_dir(config.out_dir);

    const auto axis = linspace(args.vmin_mv * kMilli, args.vmax_mv * kMilli,
                               static_cast<std::size_t>(args.points));
    const ScanResult scan =
        dc_scan(params, axis, vrf_mv * kMilli, f, tpump, {config.integrator, config.threads});
    {
        auto csv = open_output(config.out_dir / "scan.csv");
        io::write_scan_csv(csv, scan);
        auto ref = open_output(config.out_dir / "scan_reference.csv");
        io::write_scan_reference_csv(ref, scan);
    }

    Manifest m = base_manifest("scan", config, params);
    m.add("vmin_mv", args.vmin_mv);
    m.add("vmax_mv", args.vmax_mv);
    m.add("points", static_cast<double>(args.points));
    m.add("vrf_mv", vrf_mv);
    m.add("f_ghz", f);
    m.add("tpump_ns", tpump);
    m.add("output", "scan.csv");
    m.add("output", "scan_reference.csv");
    m.write(config.out_dir / "run.txt");
    log << "wrote " << (config.out_dir / "scan.csv").string() << '\n';
    return 0;
}

int cmd_map(const RunConfig& config, const MapArgs& args, std::ostream& log) {
    validate_run_config(config);
    const ModelParams params = resolve_model(config);
    const bool use_defaults = config.paper_defaults;
    const double f = require_value(args.f_ghz, use_defaults, 10.0 * params.delta0(), "f-ghz");
    const double tpump = require_value(args.tpump_ns, use_defaults, 0.9 / params.delta0(), "tpump-ns");
    require(std::isfinite(args.vdc_min_mv) && std::isfinite(args.vdc_max_mv) &&
                args.vdc_max_mv > args.vdc_min_mv,
            "--vdc-max-mv must exceed --vdc-min-mv");
    require(std::isfinite(args.vrf_min_mv) && std::isfinite(args.vrf_max_mv) &&
                args.vrf_min_mv >= 0.0 && args.vrf_max_mv > args.vrf_min_mv,
            "--vrf range must be non-negative and increasing");
    require(args.vdc_points >= 2 && args.vrf_points >= 2, "map axes need >= 2 points");
    require(std::isfinite(f) && f > 0.0, "--f-ghz must be positive");
    require(std::isfinite(tpump) && tpump > 0.0, "--tpump-ns must be positive");
    prepare_out_dir(config.out_dir);

    const auto vdc = linspace(args.vdc_min_mv * kMilli, args.vdc_max_mv * kMilli,
                              static_cast<std::size_t>(args.vdc_points));
    const auto vrf = linspace(args.vrf_min_mv * kMilli, args.vrf_max_mv * kMilli,
                              static_cast<std::size_t>(args.vrf_points));
    const HeatMap map = map2d(params, vdc, vrf, f, tpump, {config.integrator, config.threads});
    {
        auto csv = open_output(config.out_dir / "map.csv");
        io::write_heatmap_csv(csv, map);
        auto overlay = open_output(config.out_dir / "map_resonances.csv");
        io::write_overlay(overlay, map);
        if (args.svg) {
            auto svg = open_output(config.out_dir / "map.svg");
            io::write_heatmap_svg(svg, map);
        }
    }

    Manifest m = base_manifest("map", config, params);
    m.add("vdc_min_mv", args.vdc_min_mv);
    m.add("vdc_max_mv", args.vdc_max_mv);
    m.add("vdc_points", static_cast<double>(args.vdc_points));
    m.add("vrf_min_mv", args.vrf_min_mv);
    m.add("vrf_max_mv", args.vrf_max_mv);
    m.add("vrf_points", static_cast<double>(args.vrf_points));
    m.add("f_ghz", f);
    m.add("tpump_ns", tpump);
    m.add("svg", args.svg ? "true" : "false");
    m.add("output", "map.csv");
    m.add("output", "map_resonances.csv");
    if (args.svg) {
        m.add("output", "map.svg");
    }
    m.write(config.out_dir / "run.txt");
    log << "wrote " << (config.out_dir / "map.csv").string() << '\n';
    return 0;
}

int cmd_lz(const RunConfig& config, const LZArgs& args, std::ostream& log) {
    validate_run_config(config);
    const ModelParams params = resolve_model(config);
    const bool use_defaults = config.paper_defaults;
    // Default ramp: +/- 40 Delta of bias around the crossing.
    const double crossing = -params.epsilon_offset() / params.kappa();
    const double half_span = 40.0 * params.delta0() / params.kappa();
    const double vstart_mv =
        require_value(args.vstart_mv, use_defaults, (crossing - half_span) / kMilli, "vstart-mv");
    const double vend_mv =
        require_value(args.vend_mv, use_defaults, (crossing + half_span) / kMilli, "vend-mv");
    require_finite(vstart_mv, "vstart-mv");
    require_finite(vend_mv, "vend-mv");

    std::vector<double> rates = args.rates_v_per_ns;
    double dl_min = 0.0;
    double dl_max = 0.0;
    if (rates.empty()) {
        dl_min = require_value(args.adiabaticity_min, use_defaults, 0.05, "adiabaticity-min");
        dl_max = require_value(args.adiabaticity_max, use_defaults, 2.0, "adiabaticity-max");
        require(dl_min > 0.0 && dl_max >= dl_min, "adiabaticity range must be positive");
        require(args.count >= 1, "--count must be >= 1");
        for (int k = 0; k < args.count; ++k) {
            const double frac = args.count == 1 ? 0.0 : static_cast<double>(k) / (args.count - 1);
            const double dl = dl_min * std::pow(dl_max / dl_min, frac);
            rates.push_back(LZParams::rate_for_adiabaticity(params.delta0(), dl) / params.kappa());
        }
    }
    for (const double r : rates) {
        require(std::isfinite(r) && r > 0.0, "--rate-v-per-ns values must be positive");
    }
    const double eps_start = bias(params, vstart_mv * kMilli);
    const double eps_end = bias(params, vend_mv * kMilli);
    require(eps_start * eps_end < 0.0, "ramp does not cross the avoided crossing");
    require(std::abs(eps_end - eps_start) >= 20.0 * params.delta0(),
            "ramp must span at least 20 Delta of bias");
    prepare_out_dir(config.out_dir);

    const auto survival = parallel_map<double>(rates.size(), config.threads, [&](std::size_t k) {
        return lz_sweep(params, vstart_mv * kMilli, vend_mv * kMilli, rates[k], config.integrator);
    });
    std::vector<LZRun> runs;
    for (std::size_t k = 0; k < rates.size(); ++k) {
        runs.push_back({rates[k], survival[k]});
    }
    {
        auto csv = open_output(config.out_dir / "lz.csv");
        io::write_lz_csv(csv, runs);
    }

    Manifest m = base_manifest("lz", config, params);
    m.add("vstart_mv", vstart_mv);
    m.add("vend_mv", vend_mv);
    if (args.rates_v_per_ns.empty()) {
        m.add("adiabaticity_min", dl_min);
        m.add("adiabaticity_max", dl_max);
        m.add("count", static_cast<double>(args.count));
    }
    for (const double r : rates) {
        m.add("rate_v_per_ns", r);
    }
    m.add("output", "lz.csv");
    m.write(config.out_dir / "run.txt");
    log << "wrote " << (config.out_dir / "lz.csv").string() << '\n';
    return 0;
}

int cmd_extract(const RunConfig& config, const ExtractArgs& args, std::ostream& log) {
    validate_run_config(config);
    const fs::path scan_csv = args.scan_csv.value_or(config.out_dir / "scan.csv");
    const fs::path reference_csv =
        args.reference_csv.value_or(scan_csv.parent_path() / "scan_reference.csv");
    const fs::path lz_csv = args.lz_csv.value_or(config.out_dir / "lz.csv");
    double f = 0.0;
    if (args.f_ghz) {
        f = *args.f_ghz;
    } else if (config.paper_defaults || config.config_path) {
        f = 10.0 * resolve_model(config).delta0();
    } else {
        throw UsageError("missing --f-ghz (or pass --paper-defaults)");
    }
    require(std::isfinite(f) && f > 0.0, "--f-ghz must be positive");
    require(args.peak_threshold > 0.0 && args.peak_threshold < 1.0,
            "--peak-threshold must lie in (0, 1)");
    prepare_out_dir(config.out_dir);

    ScanResult scan;
    std::vector<LZRun> runs;
    try {
        scan = io::read_scan(scan_csv, reference_csv, f);
        runs = io::read_lz_runs(lz_csv);
    } catch (const DomainError& e) {
        throw UsageError(std::string("input: ") + e.what());
    }
    ExtractionOptions opts;
    opts.peak_threshold = args.peak_threshold;
    const DeltaExtraction result = extract_delta(scan, runs, opts);

    {
        auto out = open_output(config.out_dir / "extract.txt");
        out << "kappa_ghz_per_v=" << io::format_number(result.kappa) << '\n'
            << "kappa_uncertainty=" << io::format_number(result.kappa_uncertainty) << '\n'
            << "delta_ghz=" << io::format_number(result.delta) << '\n'
            << "delta_uncertainty=" << io::format_number(result.delta_uncertainty) << '\n'
            << "delta_spread=" << io::format_number(result.delta_spread) << '\n';
        for (const AssignedPeak& p : result.peaks) {
            out << "peak n=" << p.n << " v_dc=" << io::format_number(p.position) << '\n';
        }
        for (std::size_t k = 0; k < runs.size(); ++k) {
            out << "lz rate=" << io::format_number(runs[k].sweep_rate_v_per_ns)
                << " survival=" << io::format_number(runs[k].survival)
                << " delta=" << io::format_number(result.delta_per_run[k]) << '\n';
        }
    }
    Manifest m;
    m.add("command", "extract");
    m.add("scan", scan_csv.string());
    m.add("reference", reference_csv.string());
    m.add("lz", lz_csv.string());
    m.add("f_ghz", f);
    m.add("peak_threshold", args.peak_threshold);
    m.add("output", "extract.txt");
    m.write(config.out_dir / "run.txt");

    log << "kappa = " << io::format_number(result.kappa) << " +/- "
        << io::format_number(result.kappa_uncertainty) << " GHz/V\n"
        << "delta = " << io::format_number(result.delta) << " +/- "
        << io::format_number(result.delta_uncertainty) << " GHz\n";
    return 0;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Non-resonant LZSM control of a single surface spin"};
    app.require_subcommand(1);

    RunConfig config;
    std::string config_path;
    std::string out_dir = ".";
    app.add_option("--config", config_path, "key=value model parameter file");
    app.add_flag("--paper-defaults", config.paper_defaults,
                 "Fe/MgO constants, calibrated lever arm and default drive settings");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", config.threads, "sweep parallelism");
    app.add_option("--seed", config.seed, "reserved");
    app.add_option("--steps-per-period", config.integrator.steps_per_period,
                   "integrator steps per shortest period");
    app.add_option("--tolerance", config.integrator.tolerance, "integrator tolerance");
    app.add_flag("--adaptive", config.integrator.adaptive, "refine steps until converged");

    LevelsArgs levels;
    auto* levels_cmd = app.add_subcommand("levels", "adiabatic levels versus V_dc");
    levels_cmd->add_option("--vmin-mv", levels.vmin_mv);
    levels_cmd->add_option("--vmax-mv", levels.vmax_mv);
    levels_cmd->add_option("--points", levels.points);

    TraceArgs trace;
    auto* trace_cmd = app.add_subcommand("trace", "<S_z>(t) for CW and pulsed driving");
    trace_cmd->add_option("--vdc-mv", trace.vdc_mv);
    trace_cmd->add_option("--vrf-mv", trace.vrf_mv);
    trace_cmd->add_option("--f-ghz", trace.f_ghz);
    trace_cmd->add_option("--tpump-ns", trace.tpump_ns, "pulse durations; inf = continuous");
    trace_cmd->add_option("--tend-ns", trace.tend_ns);
    trace_cmd->add_option("--sample-ns", trace.sample_ns);

    ScanArgs scan;
    auto* scan_cmd = app.add_subcommand("scan", "<S_z>(t_pump) versus V_dc");
    scan_cmd->add_option("--vmin-mv", scan.vmin_mv);
    scan_cmd->add_option("--vmax-mv", scan.vmax_mv);
    scan_cmd->add_option("--points", scan.points);
    scan_cmd->add_option("--vrf-mv", scan.vrf_mv);
    scan_cmd->add_option("--f-ghz", scan.f_ghz);
    scan_cmd->add_option("--tpump-ns", scan.tpump_ns);

    MapArgs map;
    auto* map_cmd = app.add_subcommand("map", "<S_z>(t_pump) over (V_dc, V_rf)");
    map_cmd->add_option("--vdc-min-mv", map.vdc_min_mv);
    map_cmd->add_option("--vdc-max-mv", map.vdc_max_mv);
    map_cmd->add_option("--vdc-points", map.vdc_points);
    map_cmd->add_option("--vrf-min-mv", map.vrf_min_mv);
    map_cmd->add_option("--vrf-max-mv", map.vrf_max_mv);
    map_cmd->add_option("--vrf-points", map.vrf_points);
    map_cmd->add_option("--f-ghz", map.f_ghz);
    map_cmd->add_option("--tpump-ns", map.tpump_ns);
    map_cmd->add_flag("--svg", map.svg, "also render map.svg");

    LZArgs lz;
    auto* lz_cmd = app.add_subcommand("lz", "Landau-Zener survival after linear ramps");
    lz_cmd->add_option("--vstart-mv", lz.vstart_mv);
    lz_cmd->add_option("--vend-mv", lz.vend_mv);
    lz_cmd->add_option("--rate-v-per-ns", lz.rates_v_per_ns, "explicit sweep rates");
    lz_cmd->add_option("--adiabaticity-min", lz.adiabaticity_min);
    lz_cmd->add_option("--adiabaticity-max", lz.adiabaticity_max);
    lz_cmd->add_option("--count", lz.count);

    ExtractArgs extract;
    std::string scan_path;
    std::string reference_path;
    std::string lz_path;
    auto* extract_cmd = app.add_subcommand("extract", "infer Delta from scan + LZ files");
    extract_cmd->add_option("--scan", scan_path);
    extract_cmd->add_option("--reference", reference_path);
    extract_cmd->add_option("--lz", lz_path);
    extract_cmd->add_option("--f-ghz", extract.f_ghz);
    extract_cmd->add_option("--peak-threshold", extract.peak_threshold);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: usage: " << e.what() << '\n';
        return 2;
    }

    if (!config_path.empty()) {
        config.config_path = config_path;
    }
    config.out_dir = out_dir;
    if (!scan_path.empty()) {
        extract.scan_csv = scan_path;
    }
    if (!reference_path.empty()) {
        extract.reference_csv = reference_path;
    }
    if (!lz_path.empty()) {
        extract.lz_csv = lz_path;
    }

    try {
        if (*levels_cmd) {
            return cmd_levels(config, levels, out);
        }
        if (*trace_cmd) {
            return cmd_trace(config, trace, out);
        }
        if (*scan_cmd) {
            return cmd_scan(config, scan, out);
        }
        if (*map_cmd) {
            return cmd_map(config, map, out);
        }
        if (*lz_cmd) {
            return cmd_lz(config, lz, out);
        }
        if (*extract_cmd) {
            return cmd_extract(config, extract, out);
        }
    } catch (const UsageError& e) {
        err << "error: validation: " << e.what() << '\n';
        return 2;
    } catch (const ExtractionError& e) {
        err << "error: extraction: " << e.what() << '\n';
        return 3;
    } catch (const IntegrationError& e) {
        err << "error: integration: " << e.what()
            << " (last good t = " << io::format_number(e.last_good_time_ns()) << " ns)\n";
        return 3;
    } catch (const DomainError& e) {
        err << "error: domain: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: io: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace lzsm::cli
