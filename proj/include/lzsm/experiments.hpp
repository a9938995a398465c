#pragma once

// Pulse traces, detuning scans, (V_dc, V_rf) maps, Landau-Zener sweeps and the
// combined LZ + LZSM extraction of the tunneling splitting.

#include "lzsm/analytic.hpp"
#include "lzsm/model.hpp"
#include "lzsm/propagator.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace lzsm {

// `count` evenly spaced values from start to stop inclusive.
std::vector<double> linspace(double start, double stop, std::size_t count);

struct SweepOptions {
    IntegratorOptions integrator;
    unsigned threads = 1;
};

struct ScanResult {
    std::vector<double> v_dc;
    std::vector<double> sz_final;
    // <S_z> of the initial adiabatic ground state at each V_dc (the reference
    // read before the RF pulse).
    std::vector<double> sz_initial;
    std::vector<double> wall_time_s;
    double v_rf = 0.0;
    double frequency_ghz = 0.0;
    double t_pump_ns = 0.0;

    // |sz_final - sz_initial| per point.
    std::vector<double> flip_amplitude() const;
};

struct HeatMap {
    std::vector<double> v_dc;
    std::vector<double> v_rf;
    // Row-major: row i is v_dc[i], column j is v_rf[j].
    std::vector<double> sz;
    std::vector<double> sz_initial;
    std::vector<Resonance> overlay;
    double frequency_ghz = 0.0;
    double t_pump_ns = 0.0;

    double at(std::size_t i_dc, std::size_t j_rf) const { return sz[i_dc * v_rf.size() + j_rf]; }
    double flip(std::size_t i_dc, std::size_t j_rf) const {
        return std::abs(at(i_dc, j_rf) - sz_initial[i_dc]);
    }
};

// <S_z> at t = t_pump starting from the adiabatic ground state at V_dc.  This is
// the unit of work of dc_scan and map2d (samples only t = 0 and t = t_pump).
double pulse_endpoint_sz(const ModelParams& params, double v_dc, double v_rf, double frequency_ghz,
                         double t_pump_ns, const IntegratorOptions& opts);

// One trajectory per pulse duration (use infinity for continuous driving), all
// from the adiabatic ground state at V_dc.
std::vector<Trajectory> pulse_trace(const ModelParams& params, double v_dc, double v_rf,
                                    double frequency_ghz, const std::vector<double>& t_pump_list,
                                    double t_end_ns, const IntegratorOptions& opts = {});

ScanResult dc_scan(const ModelParams& params, const std::vector<double>& v_dc_axis, double v_rf,
                   double frequency_ghz, double t_pump_ns, const SweepOptions& opts = {});

HeatMap map2d(const ModelParams& params, const std::vector<double>& v_dc_axis,
              const std::vector<double>& v_rf_axis, double frequency_ghz, double t_pump_ns,
              const SweepOptions& opts = {});

struct LZSweepResult {
    // Asymptotic occupation of the initial diabatic state after the ramp.
    double survival;
    // Plain diabatic occupation at the ramp end (includes the finite-bias admixture).
    double diabatic_occupation;
    double bias_sweep_rate;  // GHz/ns
};

LZSweepResult lz_sweep_detailed(const ModelParams& params, double v_start, double v_end,
                                double sweep_rate_v_per_ns, const IntegratorOptions& opts = {});

// Survival probability of the initial diabatic state after a linear voltage ramp
// from v_start to v_end at |dV/dt| = sweep_rate.
double lz_sweep(const ModelParams& params, double v_start, double v_end,
                double sweep_rate_v_per_ns, const IntegratorOptions& opts = {});

struct Peak {
    double position;
    double height;
    std::size_t index;
};

// Interior local maxima of `signal` whose height is at least threshold_fraction
// of the global maximum, refined by a parabola through the three neighbouring points.
std::vector<Peak> find_peaks(std::span<const double> axis, std::span<const double> signal,
                             double threshold_fraction);

struct AssignedPeak {
    int n;
    double position;
    double height;
};

struct LZRun {
    double sweep_rate_v_per_ns;
    double survival;
};

struct ExtractionOptions {
    double peak_threshold = 0.2;
    // Absolute floor on the flip amplitude, so that a flat scan yields no peaks.
    double min_peak_height = 0.05;
    int min_peaks_per_side = 2;
};

struct DeltaExtraction {
    double kappa;              // GHz/V
    double kappa_uncertainty;
    std::vector<AssignedPeak> peaks;
    std::vector<double> survival;
    std::vector<double> delta_per_run;
    double delta;              // GHz
    double delta_spread;       // sample standard deviation over runs
    double delta_uncertainty;  // spread of the mean combined with the kappa error
};

// (1) Fits resonance peak positions to V_n = n f / kappa; (2) inverts each LZ
// survival with d eps/dt = kappa * sweep_rate.
DeltaExtraction extract_delta(const ScanResult& scan, const std::vector<LZRun>& lz_runs,
                              const ExtractionOptions& opts = {});

// Flip amplitude along V_rf at the V_dc rows within `half_window` rows of voltage v.
std::vector<double> fringe_profile(const HeatMap& map, double v, std::size_t half_window = 2);

// Centre of the fringe near `predicted` (searching +/- search_halfwidth volts)
// in the V_rf column where that fringe is strongest.
struct FringeCentre {
    double position;
    std::size_t column;
    double height;
};

FringeCentre locate_fringe(const HeatMap& map, double predicted, double search_halfwidth);

}  // namespace lzsm
