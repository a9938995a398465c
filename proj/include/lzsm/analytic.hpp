#pragma once

// Closed-form Landau-Zener and fast-driving LZSM results.  All quantities are
// in linear-frequency units: energies and rates in GHz and GHz/ns.

#include "lzsm/model.hpp"

#include <vector>

namespace lzsm {

class LZParams {
public:
    // delta >= 0 (GHz), bias_sweep_rate > 0 (GHz/ns, |d eps/dt| at the crossing).
    LZParams(double delta_ghz, double bias_sweep_rate);

    double delta() const noexcept { return delta_; }
    double bias_sweep_rate() const noexcept { return rate_; }

    // Adiabaticity delta_l such that P_LZ = exp(-2 pi delta_l).  In linear-frequency
    // units this is pi * delta^2 / (2 * rate).
    double adiabaticity() const noexcept;

    // Sweep rate giving a target adiabaticity.
    static double rate_for_adiabaticity(double delta_ghz, double adiabaticity);

private:
    double delta_;
    double rate_;
};

// Probability of a diabatic passage through the avoided crossing,
// exp(-pi^2 delta^2 / rate) = exp(-2 pi delta_l).
double lz_probability(const LZParams& p);

// Inverts lz_probability: delta = sqrt(-rate * ln(survival)) / pi.
double delta_from_lz_survival(double survival, double bias_sweep_rate);

// Bessel function of the first kind J_n(x) for |n| <= 200, |x| <= 1000.
double bessel_j(int n, double x);

// Smallest positive x with J_n(x) = 0, the k-th one for k = 1, 2, ...
double bessel_j_zero(int n, int k);

struct ResonanceSpec {
    int n;
    double omega;     // drive angular frequency, rad/ns
    double gamma_v;   // bias coupling in angular units, rad/ns per V
    double v_rf;      // V
    double gamma_n;   // Delta * J_n(kappa V_rf / f), GHz
    double omega_n;   // sqrt((n f - eps_dc)^2 + gamma_n^2), GHz
};

// Delta * J_n(kappa * V_rf / f).
double gamma_n(const ModelParams& params, const DriveProtocol& protocol, int n);

ResonanceSpec resonance_spec(const ModelParams& params, const DriveProtocol& protocol, int n);

// ceil(kappa (|V_dc| + V_rf) / f) + 10.
int default_harmonic_cutoff(const ModelParams& params, const DriveProtocol& protocol);

struct FastDriveResult {
    double probability;    // clamped to [0, 1]
    double raw_sum;        // unclamped sum over harmonics
    double dominant_term;  // largest single harmonic contribution
    int dominant_n;
    // (d eps/dt at the crossing) / Delta^2; the formula needs this >> 1.
    double sweep_ratio;
    bool fast_regime;      // sweep_ratio >= 10
    bool clamped;          // raw_sum exceeded 1 by more than 1e-6
};

// Transition probability S_z = -2 -> +2 in the fast-driving regime, summed over
// harmonics -n_max..n_max.  The system is assumed to start in S_z = -2.  For
// pulses the sum is evaluated at min(t, t_pump).
FastDriveResult fast_drive_analysis(const ModelParams& params, const DriveProtocol& protocol,
                                    double t_ns, int n_max);

double fast_drive_probability(const ModelParams& params, const DriveProtocol& protocol,
                              double t_ns, int n_max);

struct Resonance {
    int n;
    double voltage;
};

// V_n with kappa V_n + eps0 = n f for n = -n_max..-1, 1..n_max (ascending).
std::vector<Resonance> resonance_voltages(const ModelParams& params, double frequency_ghz,
                                          int n_max);

}  // namespace lzsm
