#pragma once

// Two-level model of the Fe2+ S_z = +/-2 ground doublet on MgO driven by the
// junction voltage.  Energies are linear frequencies in GHz (E/h), times in ns,
// displacements in nm and voltages in V.

#include <Eigen/Dense>

#include <utility>
#include <variant>

namespace lzsm {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Reference constants of the Fe/MgO junction.
inline constexpr double kFeMgoDelta0Ghz = 0.05;
inline constexpr double kFeMgoAlphaHGhzPerNm = 270.0;
inline constexpr double kFeMgoAlphaF24GhzPerNm = 1.0;
// Calibration anchor: the n = 1 resonance of a 0.5 GHz drive sits at 0.15 V.
inline constexpr double kFeMgoResonanceVoltage = 0.15;
inline constexpr double kFeMgoResonanceFrequencyGhz = 0.5;

struct ModelConfig {
    double delta0_ghz = kFeMgoDelta0Ghz;
    double alpha_h_ghz_per_nm = kFeMgoAlphaHGhzPerNm;
    double alpha_f24_ghz_per_nm = kFeMgoAlphaF24GhzPerNm;
    double lever_arm_nm_per_v = 0.0;
    double epsilon_offset_ghz = 0.0;
    double quad_bias_ghz_per_nm2 = 0.0;
    bool tunneling_modulation = false;
};

class ModelParams {
public:
    // Throws DomainError unless delta0 > 0, lever_arm > 0 and all fields finite.
    explicit ModelParams(const ModelConfig& config);

    // Chooses the lever arm so that 2 * alpha_h * lambda * resonance_voltage equals
    // resonance_frequency, i.e. the first harmonic resonance lands on resonance_voltage.
    static ModelParams calibrated(double delta0_ghz, double alpha_h_ghz_per_nm,
                                  double resonance_voltage, double resonance_frequency_ghz);

    // Delta = 0.05 GHz, alpha_h = 270 GHz/nm, 24 alpha_F = 1 GHz/nm, calibrated lever arm.
    static ModelParams fe_mgo();

    double delta0() const noexcept { return config_.delta0_ghz; }
    double alpha_h() const noexcept { return config_.alpha_h_ghz_per_nm; }
    double alpha_f_scaled() const noexcept { return config_.alpha_f24_ghz_per_nm; }
    double lever_arm() const noexcept { return config_.lever_arm_nm_per_v; }
    double epsilon_offset() const noexcept { return config_.epsilon_offset_ghz; }
    double quad_bias() const noexcept { return config_.quad_bias_ghz_per_nm2; }
    bool include_tunneling_modulation() const noexcept { return config_.tunneling_modulation; }

    // Bias per volt, 2 * alpha_h * lambda (GHz/V).
    double kappa() const noexcept { return kappa_; }
    // The same coupling in angular units (rad/ns per V).
    double gamma_angular() const noexcept { return kTwoPi * kappa_; }

    const ModelConfig& config() const noexcept { return config_; }

    ModelParams with_delta0(double delta0_ghz) const;

private:
    ModelConfig config_;
    double kappa_;
};

struct ContinuousWave {};

struct Pulse {
    double t_pump_ns;
};

struct LinearRamp {
    double v_start;
    double sweep_rate_v_per_ns;
    double duration_ns;
};

using DriveMode = std::variant<ContinuousWave, Pulse, LinearRamp>;

class DriveProtocol {
public:
    static DriveProtocol continuous_wave(double v_dc, double v_rf, double frequency_ghz,
                                         double phase = 0.0);
    static DriveProtocol pulse(double v_dc, double v_rf, double frequency_ghz, double t_pump_ns,
                               double phase = 0.0);
    static DriveProtocol linear_ramp(double v_start, double sweep_rate_v_per_ns,
                                     double duration_ns);

    // Junction voltage at time t (ns).
    double voltage(double t_ns) const noexcept;

    // Time after which the drive is static (t_pump for pulses, infinity otherwise).
    double drive_end() const noexcept;

    // Largest |V| reachable over [0, t_end].
    double max_abs_voltage(double t_end_ns) const noexcept;

    double v_dc() const noexcept { return v_dc_; }
    double v_rf() const noexcept { return v_rf_; }
    double frequency() const noexcept { return frequency_; }
    double phase() const noexcept { return phase_; }
    const DriveMode& mode() const noexcept { return mode_; }

    bool is_ramp() const noexcept { return std::holds_alternative<LinearRamp>(mode_); }

private:
    DriveProtocol(double v_dc, double v_rf, double frequency, double phase, DriveMode mode)
        : v_dc_(v_dc), v_rf_(v_rf), frequency_(frequency), phase_(phase), mode_(mode) {}

    double v_dc_;
    double v_rf_;
    double frequency_;
    double phase_;
    DriveMode mode_;
};

// Coefficients of H = x * sigma_x + z * sigma_z (GHz).
struct PauliVector {
    double x;
    double z;
};

// Piezoelectric displacement lambda * v (nm).
double displacement(const ModelParams& params, double v);

// Energy bias 2 alpha_h dz + quad * dz^2 + eps0 (GHz).
double bias(const ModelParams& params, double v);

// Tunneling splitting at displacement dz (GHz).
double tunneling(const ModelParams& params, double dz_nm);

// -Delta/2 sigma_x - eps/2 sigma_z at junction voltage v.
PauliVector pauli_at_voltage(const ModelParams& params, double v);

// Instantaneous Hamiltonian in the diabatic basis {|+2>, |-2>}, GHz.
Eigen::Matrix2cd hamiltonian(const ModelParams& params, const DriveProtocol& protocol, double t_ns);

struct AdiabaticLevels {
    double e_minus;
    double e_plus;
};

AdiabaticLevels adiabatic_levels(const ModelParams& params, double v_dc);

}  // namespace lzsm
