#include "lzsm/experiments.hpp"

#include "lzsm/errors.hpp"
#include "lzsm/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace lzsm {

namespace {

void require_axis(const std::vector<double>& axis, const char* name) {
    if (axis.size() < 2) {
        throw DomainError(std::string(name) + " axis needs at least two points");
    }
    for (std::size_t i = 0; i < axis.size(); ++i) {
        if (!std::isfinite(axis[i]) || (i > 0 && !(axis[i] > axis[i - 1]))) {
            throw DomainError(std::string(name) + " axis must be finite and strictly increasing");
        }
    }
}

void require_drive(double frequency_ghz, double t_pump_ns) {
    if (!(frequency_ghz > 0.0) || !std::isfinite(frequency_ghz)) {
        throw DomainError("drive frequency must be positive");
    }
    if (!(t_pump_ns > 0.0) || !std::isfinite(t_pump_ns)) {
        throw DomainError("t_pump must be positive and finite");
    }
}

// Vertex of the parabola through (x0,y0), (x1,y1), (x2,y2).
std::pair<double, double> parabola_vertex(double x0, double y0, double x1, double y1, double x2,
                                          double y2) {
    const double u0 = x0 - x1;
    const double u2 = x2 - x1;
    const double d0 = y0 - y1;
    const double d2 = y2 - y1;
    const double det = u0 * u2 * (u0 - u2);
    const double a = (d0 * u2 - d2 * u0) / det;
    const double b = (d2 * u0 * u0 - d0 * u2 * u2) / det;
    if (!(a < 0.0)) {
        return {x1, y1};
    }
    const double u = std::clamp(-b / (2.0 * a), u0, u2);
    return {x1 + u, y1 + a * u * u + b * u};
}

std::size_t nearest_index(const std::vector<double>& axis, double v) {
    const auto it = std::lower_bound(axis.begin(), axis.end(), v);
    if (it == axis.begin()) {
        return 0;
    }
    if (it == axis.end()) {
        return axis.size() - 1;
    }
    const auto i = static_cast<std::size_t>(it - axis.begin());
    return (axis[i] - v) < (v - axis[i - 1]) ? i : i - 1;
}

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace

std::vector<double> linspace(double start, double stop, std::size_t count) {
    if (count < 2) {
        throw DomainError("linspace needs at least two points");
    }
    std::vector<double> out(count);
    const double step = (stop - start) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = start + static_cast<double>(i) * step;
    }
    out.back() = stop;
    return out;
}

std::vector<double> ScanResult::flip_amplitude() const {
    std::vector<double> out(sz_final.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = std::abs(sz_final[i] - sz_initial[i]);
    }
    return out;
}

double pulse_endpoint_sz(const ModelParams& params, double v_dc, double v_rf, double frequency_ghz,
                         double t_pump_ns, const IntegratorOptions& opts) {
    const DriveProtocol protocol = DriveProtocol::pulse(v_dc, v_rf, frequency_ghz, t_pump_ns);
    const SpinState psi0 = default_initial_state(params, protocol);
    IntegratorOptions endpoint = opts;
    endpoint.sample_interval_ns = t_pump_ns;
    return evolve(params, protocol, psi0, t_pump_ns, endpoint).back().sz;
}

std::vector<Trajectory> pulse_trace(const ModelParams& params, double v_dc, double v_rf,
                                    double frequency_ghz, const std::vector<double>& t_pump_list,
                                    double t_end_ns, const IntegratorOptions& opts) {
    if (t_pump_list.empty()) {
        throw DomainError("pulse_trace needs at least one pulse duration");
    }
    std::vector<Trajectory> out;
    out.reserve(t_pump_list.size());
    for (const double t_pump : t_pump_list) {
        const DriveProtocol protocol = DriveProtocol::pulse(v_dc, v_rf, frequency_ghz, t_pump);
        out.push_back(evolve(params, protocol, default_initial_state(params, protocol), t_end_ns,
                             opts));
    }
    return out;
}

ScanResult dc_scan(const ModelParams& params, const std::vector<double>& v_dc_axis, double v_rf,
                   double frequency_ghz, double t_pump_ns, const SweepOptions& opts) {
    require_axis(v_dc_axis, "V_dc");
    require_drive(frequency_ghz, t_pump_ns);
    if (!(v_rf >= 0.0)) {
        throw DomainError("v_rf must be non-negative");
    }
    if (!(v_dc_axis.front() < 0.0 && v_dc_axis.back() > 0.0)) {
        throw DomainError("V_dc scan must cover both signs");
    }

    ScanResult out;
    out.v_dc = v_dc_axis;
    out.v_rf = v_rf;
    out.frequency_ghz = frequency_ghz;
    out.t_pump_ns = t_pump_ns;
    out.sz_final.resize(v_dc_axis.size());
    out.sz_initial.resize(v_dc_axis.size());
    out.wall_time_s.resize(v_dc_axis.size());

    parallel_for(v_dc_axis.size(), opts.threads, [&](std::size_t i) {
        const auto start = std::chrono::steady_clock::now();
        out.sz_final[i] =
            pulse_endpoint_sz(params, v_dc_axis[i], v_rf, frequency_ghz, t_pump_ns, opts.integrator);
        out.sz_initial[i] = expectation_sz(adiabatic_ground_state(params, v_dc_axis[i]));
        out.wall_time_s[i] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    });
    return out;
}

HeatMap map2d(const ModelParams& params, const std::vector<double>& v_dc_axis,
              const std::vector<double>& v_rf_axis, double frequency_ghz, double t_pump_ns,
              const SweepOptions& opts) {
    require_axis(v_dc_axis, "V_dc");
    require_axis(v_rf_axis, "V_rf");
    require_drive(frequency_ghz, t_pump_ns);
    if (v_rf_axis.front() < 0.0) {
        throw DomainError("V_rf axis must be non-negative");
    }

    HeatMap out;
    out.v_dc = v_dc_axis;
    out.v_rf = v_rf_axis;
    out.frequency_ghz = frequency_ghz;
    out.t_pump_ns = t_pump_ns;
    out.sz_initial.resize(v_dc_axis.size());
    for (std::size_t i = 0; i < v_dc_axis.size(); ++i) {
        out.sz_initial[i] = expectation_sz(adiabatic_ground_state(params, v_dc_axis[i]));
    }

    const std::size_t cols = v_rf_axis.size();
    out.sz = parallel_map<double>(v_dc_axis.size() * cols, opts.threads, [&](std::size_t k) {
        return pulse_endpoint_sz(params, v_dc_axis[k / cols], v_rf_axis[k % cols], frequency_ghz,
                                 t_pump_ns, opts.integrator);
    });

    const double v_max = std::max(std::abs(v_dc_axis.front()), std::abs(v_dc_axis.back()));
    const int n_max = static_cast<int>(
        std::floor((params.kappa() * v_max + std::abs(params.epsilon_offset())) / frequency_ghz));
    for (const Resonance& r : resonance_voltages(params, frequency_ghz, std::max(n_max, 1))) {
        if (r.voltage >= v_dc_axis.front() && r.voltage <= v_dc_axis.back()) {
            out.overlay.push_back(r);
        }
    }
    return out;
}

LZSweepResult lz_sweep_detailed(const ModelParams& params, double v_start, double v_end,
                                double sweep_rate_v_per_ns, const IntegratorOptions& opts) {
    if (!(sweep_rate_v_per_ns > 0.0) || !std::isfinite(sweep_rate_v_per_ns)) {
        throw DomainError("sweep rate must be positive and finite");
    }
    const double eps_start = bias(params, v_start);
    const double eps_end = bias(params, v_end);
    if (!(eps_start * eps_end < 0.0)) {
        throw DomainError("avoided crossing (eps = 0) is not strictly inside the ramp");
    }
    if (std::abs(eps_end - eps_start) < 20.0 * params.delta0()) {
        throw DomainError("ramp must span at least 20 Delta of bias");
    }

    const double span = v_end - v_start;
    const double duration = std::abs(span) / sweep_rate_v_per_ns;
    const DriveProtocol ramp =
        DriveProtocol::linear_ramp(v_start, std::copysign(sweep_rate_v_per_ns, span), duration);
    const SpinState psi0 = adiabatic_ground_state(params, v_start);

    IntegratorOptions endpoint = opts;
    if (endpoint.sample_interval_ns <= 0.0) {
        endpoint.sample_interval_ns = duration;
    }
    const SpinState psi = evolve(params, ramp, psi0, duration, endpoint).final_state;

    // The adiabatic state at the ramp end carrying the initial diabatic character.
    const bool started_plus = psi0.p_plus() >= psi0.p_minus();
    const SpinState ground_end = adiabatic_ground_state(params, v_end);
    const bool ground_is_plus = ground_end.p_plus() >= ground_end.p_minus();
    const SpinState target =
        ground_is_plus == started_plus ? ground_end : adiabatic_excited_state(params, v_end);
    const Complex overlap =
        std::conj(target.c_plus) * psi.c_plus + std::conj(target.c_minus) * psi.c_minus;

    return {std::norm(overlap), started_plus ? psi.p_plus() : psi.p_minus(),
            std::abs(params.kappa() * sweep_rate_v_per_ns)};
}

double lz_sweep(const ModelParams& params, double v_start, double v_end,
                double sweep_rate_v_per_ns, const IntegratorOptions& opts) {
    return lz_sweep_detailed(params, v_start, v_end, sweep_rate_v_per_ns, opts).survival;
}

std::vector<Peak> find_peaks(std::span<const double> axis, std::span<const double> signal,
                             double threshold_fraction) {
    if (axis.size() != signal.size()) {
        throw DomainError("axis and signal lengths differ");
    }
    std::vector<Peak> out;
    if (signal.size() < 3) {
        return out;
    }
    const double global_max = *std::max_element(signal.begin(), signal.end());
    if (!(global_max > 0.0)) {
        return out;
    }
    const double floor = threshold_fraction * global_max;
    for (std::size_t i = 1; i + 1 < signal.size(); ++i) {
        if (signal[i] > signal[i - 1] && signal[i] >= signal[i + 1] && signal[i] >= floor) {
            const auto [x, y] = parabola_vertex(axis[i - 1], signal[i - 1], axis[i], signal[i],
                                                axis[i + 1], signal[i + 1]);
            out.push_back({x, y, i});
        }
    }
    return out;
}

DeltaExtraction extract_delta(const ScanResult& scan, const std::vector<LZRun>& lz_runs,
                              const ExtractionOptions& opts) {
    if (!(scan.frequency_ghz > 0.0)) {
        throw ExtractionError("resonance-peaks", "scan carries no drive frequency");
    }
    const std::vector<double> flip = scan.flip_amplitude();
    std::vector<Peak> peaks = find_peaks(scan.v_dc, flip, opts.peak_threshold);
    std::erase_if(peaks, [&](const Peak& p) { return p.height < opts.min_peak_height; });
    if (peaks.size() < 2) {
        throw ExtractionError("resonance-peaks", "fewer than 2 resonance peaks found");
    }

    // Harmonic assignment: the median spacing seeds the period, then n and the
    // period are refined together.
    std::vector<double> gaps;
    for (std::size_t i = 1; i < peaks.size(); ++i) {
        gaps.push_back(peaks[i].position - peaks[i - 1].position);
    }
    double spacing = median(gaps);
    if (!(spacing > 0.0)) {
        throw ExtractionError("resonance-peaks", "degenerate peak spacing");
    }
    std::map<int, AssignedPeak> by_harmonic;
    for (int pass = 0; pass < 4; ++pass) {
        by_harmonic.clear();
        for (const Peak& p : peaks) {
            const int n = static_cast<int>(std::lround(p.position / spacing));
            if (n == 0) {
                continue;
            }
            auto it = by_harmonic.find(n);
            if (it == by_harmonic.end() || it->second.height < p.height) {
                by_harmonic[n] = {n, p.position, p.height};
            }
        }
        if (by_harmonic.empty()) {
            throw ExtractionError("resonance-peaks", "no peak away from the zero harmonic");
        }
        double num = 0.0;
        double den = 0.0;
        for (const auto& [n, p] : by_harmonic) {
            num += n * p.position;
            den += static_cast<double>(n) * n;
        }
        spacing = num / den;
    }

    DeltaExtraction out{};
    int positive = 0;
    int negative = 0;
    for (const auto& [n, p] : by_harmonic) {
        out.peaks.push_back(p);
        (n > 0 ? positive : negative) += 1;
    }
    if (positive < opts.min_peaks_per_side || negative < opts.min_peaks_per_side) {
        throw ExtractionError("resonance-peaks",
                              "need " + std::to_string(opts.min_peaks_per_side) +
                                  " resonance peaks on each side of V_dc = 0, found " +
                                  std::to_string(negative) + " / " + std::to_string(positive));
    }

    double sum_n2 = 0.0;
    double sum_r2 = 0.0;
    for (const AssignedPeak& p : out.peaks) {
        const double r = p.position - p.n * spacing;
        sum_r2 += r * r;
        sum_n2 += static_cast<double>(p.n) * p.n;
    }
    const auto n_peaks = static_cast<double>(out.peaks.size());
    const double spacing_sigma =
        n_peaks > 1.0 ? std::sqrt(sum_r2 / (n_peaks - 1.0) / sum_n2) : 0.0;
    out.kappa = scan.frequency_ghz / spacing;
    out.kappa_uncertainty = out.kappa * spacing_sigma / spacing;

    if (lz_runs.empty()) {
        throw ExtractionError("lz-inversion", "no Landau-Zener runs supplied");
    }
    for (const LZRun& run : lz_runs) {
        if (!(run.survival > std::numeric_limits<double>::min() &&
              run.survival < 1.0 - std::numeric_limits<double>::epsilon())) {
            throw ExtractionError("lz-inversion",
                                  "survival probability at 0 or 1 within float precision");
        }
        if (!(run.sweep_rate_v_per_ns > 0.0)) {
            throw ExtractionError("lz-inversion", "sweep rate must be positive");
        }
        out.survival.push_back(run.survival);
        out.delta_per_run.push_back(
            delta_from_lz_survival(run.survival, out.kappa * run.sweep_rate_v_per_ns));
    }
    const auto n_runs = static_cast<double>(out.delta_per_run.size());
    out.delta = std::accumulate(out.delta_per_run.begin(), out.delta_per_run.end(), 0.0) / n_runs;
    double ss = 0.0;
    for (const double d : out.delta_per_run) {
        ss += (d - out.delta) * (d - out.delta);
    }
    out.delta_spread = n_runs > 1.0 ? std::sqrt(ss / (n_runs - 1.0)) : 0.0;
    // Delta scales as sqrt(kappa) at fixed survival.
    const double kappa_part = 0.5 * out.delta * out.kappa_uncertainty / out.kappa;
    out.delta_uncertainty =
        std::sqrt(out.delta_spread * out.delta_spread / n_runs + kappa_part * kappa_part);
    return out;
}

std::vector<double> fringe_profile(const HeatMap& map, double v, std::size_t half_window) {
    const std::size_t centre = nearest_index(map.v_dc, v);
    const std::size_t lo = centre >= half_window ? centre - half_window : 0;
    const std::size_t hi = std::min(map.v_dc.size() - 1, centre + half_window);
    std::vector<double> out(map.v_rf.size(), 0.0);
    for (std::size_t j = 0; j < map.v_rf.size(); ++j) {
        for (std::size_t i = lo; i <= hi; ++i) {
            out[j] = std::max(out[j], map.flip(i, j));
        }
    }
    return out;
}

FringeCentre locate_fringe(const HeatMap& map, double predicted, double search_halfwidth) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < map.v_dc.size(); ++i) {
        if (std::abs(map.v_dc[i] - predicted) <= search_halfwidth) {
            rows.push_back(i);
        }
    }
    if (rows.empty()) {
        throw DomainError("no V_dc rows near the predicted fringe");
    }
    std::size_t best_col = 0;
    std::size_t best_row = rows.front();
    double best = -1.0;
    for (std::size_t j = 0; j < map.v_rf.size(); ++j) {
        for (const std::size_t i : rows) {
            if (map.flip(i, j) > best) {
                best = map.flip(i, j);
                best_col = j;
                best_row = i;
            }
        }
    }
    if (best_row == 0 || best_row + 1 == map.v_dc.size()) {
        return {map.v_dc[best_row], best_col, best};
    }
    const auto [x, y] = parabola_vertex(map.v_dc[best_row - 1], map.flip(best_row - 1, best_col),
                                        map.v_dc[best_row], map.flip(best_row, best_col),
                                        map.v_dc[best_row + 1], map.flip(best_row + 1, best_col));
    return {x, best_col, y};
}

}  // namespace lzsm
