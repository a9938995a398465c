#pragma once

#include "lzsm/experiments.hpp"
#include "lzsm/model.hpp"
#include "lzsm/propagator.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lzsm::cli {

// A rejected flag or input; reported as one "error: ..." line.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::optional<std::filesystem::path> config_path;
    bool paper_defaults = false;
    std::filesystem::path out_dir = ".";
    unsigned threads = 1;
    std::uint64_t seed = 0;  // reserved; every pipeline is deterministic
    IntegratorOptions integrator;
};

// Ordered key=value record of every resolved parameter, written as run.txt.
class Manifest {
public:
    void add(const std::string& key, const std::string& value);
    void add(const std::string& key, double value);
    void write(const std::filesystem::path& path) const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

struct LevelsArgs {
    double vmin_mv = -500.0;
    double vmax_mv = 500.0;
    int points = 201;
};

struct TraceArgs {
    std::optional<double> vdc_mv;
    std::optional<double> vrf_mv;
    std::optional<double> f_ghz;
    std::vector<double> tpump_ns;  // infinity = continuous wave
    double tend_ns = 60.0;
    double sample_ns = 0.0;
};

struct ScanArgs {
    double vmin_mv = -400.0;
    double vmax_mv = 400.0;
    int points = 401;
    std::optional<double> vrf_mv;
    std::optional<double> f_ghz;
    std::optional<double> tpump_ns;
};

struct MapArgs {
    double vdc_min_mv = -500.0;
    double vdc_max_mv = 500.0;
    int vdc_points = 200;
    double vrf_min_mv = 0.0;
    double vrf_max_mv = 800.0;
    int vrf_points = 200;
    std::optional<double> f_ghz;
    std::optional<double> tpump_ns;
    bool svg = false;
};

struct LZArgs {
    std::optional<double> vstart_mv;
    std::optional<double> vend_mv;
    std::vector<double> rates_v_per_ns;
    std::optional<double> adiabaticity_min;
    std::optional<double> adiabaticity_max;
    int count = 8;
};

struct ExtractArgs {
    std::optional<std::filesystem::path> scan_csv;
    std::optional<std::filesystem::path> reference_csv;
    std::optional<std::filesystem::path> lz_csv;
    std::optional<double> f_ghz;
    double peak_threshold = 0.2;
};

// Model parameters from --config (on top of the Fe/MgO constants) or --paper-defaults.
ModelParams resolve_model(const RunConfig& config);

int cmd_levels(const RunConfig& config, const LevelsArgs& args, std::ostream& log);
int cmd_trace(const RunConfig& config, const TraceArgs& args, std::ostream& log);
int cmd_scan(const RunConfig& config, const ScanArgs& args, std::ostream& log);
int cmd_map(const RunConfig& config, const MapArgs& args, std::ostream& log);
int cmd_lz(const RunConfig& config, const LZArgs& args, std::ostream& log);
int cmd_extract(const RunConfig& config, const ExtractArgs& args, std::ostream& log);

// Parses argv and dispatches; returns the process exit code.  Failures print a
// single "error: <stage>: <reason>" line on `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lzsm::cli
