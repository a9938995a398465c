#pragma once

#include "lzsm/model.hpp"

#include <complex>
#include <vector>

namespace lzsm {

using Complex = std::complex<double>;

// Amplitudes over the diabatic basis {S_z = +2, S_z = -2}.
struct SpinState {
    Complex c_plus;
    Complex c_minus;

    static SpinState spin_up() { return {1.0, 0.0}; }
    static SpinState spin_down() { return {0.0, 1.0}; }

    double norm() const noexcept { return std::sqrt(std::norm(c_plus) + std::norm(c_minus)); }
    double p_plus() const noexcept { return std::norm(c_plus); }
    double p_minus() const noexcept { return std::norm(c_minus); }
};

struct Sample {
    double t_ns;
    double sz;
    double p_plus;
    double p_minus;
};

struct Trajectory {
    std::vector<Sample> samples;
    DriveProtocol protocol;
    ModelParams params;
    // Amplitudes at the last sample, kept for chaining and refinement checks.
    SpinState final_state;

    const Sample& back() const { return samples.back(); }
};

struct IntegratorOptions {
    // Steps per shortest period (drive period or free precession period).
    int steps_per_period = 512;
    // Absolute tolerance for the optional step-halving refinement and the norm check.
    double tolerance = 1e-9;
    // Sampling interval in ns; <= 0 selects 1/(20 f) for periodic drives and
    // duration/1000 for ramps.
    double sample_interval_ns = 0.0;
    // Halve the step until two successive final states agree within tolerance.
    bool adaptive = false;
    int max_refinements = 6;
};

// <S_z> = 2 (|c+|^2 - |c-|^2).  Throws DomainError if |norm - 1| > 1e-6.
double expectation_sz(const SpinState& psi);

// Lower eigenvector of the Hamiltonian at junction voltage v.
SpinState adiabatic_ground_state(const ModelParams& params, double v);

// Upper eigenvector of the Hamiltonian at junction voltage v.
SpinState adiabatic_excited_state(const ModelParams& params, double v);

// Default initial state: adiabatic ground state at V(0).
SpinState default_initial_state(const ModelParams& params, const DriveProtocol& protocol);

// Integrates i dpsi/dt = 2 pi H(t) psi with a fourth-order commutator-free
// exponential integrator.  The trajectory contains t = 0, every multiple of
// the sample interval below t_end, and t_end itself.
Trajectory evolve(const ModelParams& params, const DriveProtocol& protocol, const SpinState& psi0,
                  double t_end_ns, const IntegratorOptions& opts = {});

// Period of the free precession after the drive switches off, 1/sqrt(Delta^2 + eps^2).
double free_ringing_period(const ModelParams& params, double v_dc);

}  // namespace lzsm
