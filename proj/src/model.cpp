#include "lzsm/model.hpp"

#include "lzsm/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace lzsm {

namespace {

void require_finite(double value, const char* what) {
    if (!std::isfinite(value)) {
        throw DomainError(std::string(what) + " must be finite");
    }
}

}  // namespace

ModelParams::ModelParams(const ModelConfig& config) : config_(config) {
    require_finite(config.delta0_ghz, "delta0");
    require_finite(config.alpha_h_ghz_per_nm, "alpha_h");
    require_finite(config.alpha_f24_ghz_per_nm, "alpha_f_scaled");
    require_finite(config.lever_arm_nm_per_v, "lever_arm");
    require_finite(config.epsilon_offset_ghz, "epsilon_offset");
    require_finite(config.quad_bias_ghz_per_nm2, "quad_bias");
    if (!(config.delta0_ghz > 0.0)) {
        throw DomainError("delta0 must be positive");
    }
    if (!(config.lever_arm_nm_per_v > 0.0)) {
        throw DomainError("lever_arm must be positive");
    }
    kappa_ = 2.0 * config_.alpha_h_ghz_per_nm * config_.lever_arm_nm_per_v;
}

ModelParams ModelParams::calibrated(double delta0_ghz, double alpha_h_ghz_per_nm,
                                    double resonance_voltage, double resonance_frequency_ghz) {
    require_finite(resonance_voltage, "resonance_voltage");
    require_finite(resonance_frequency_ghz, "resonance_frequency");
    if (resonance_voltage == 0.0 || alpha_h_ghz_per_nm == 0.0) {
        throw DomainError("calibration needs nonzero resonance voltage and alpha_h");
    }
    ModelConfig config;
    config.delta0_ghz = delta0_ghz;
    config.alpha_h_ghz_per_nm = alpha_h_ghz_per_nm;
    config.lever_arm_nm_per_v =
        resonance_frequency_ghz / (2.0 * alpha_h_ghz_per_nm * resonance_voltage);
    return ModelParams(config);
}

ModelParams ModelParams::fe_mgo() {
    return calibrated(kFeMgoDelta0Ghz, kFeMgoAlphaHGhzPerNm, kFeMgoResonanceVoltage,
                      kFeMgoResonanceFrequencyGhz);
}

ModelParams ModelParams::with_delta0(double delta0_ghz) const {
    ModelConfig config = config_;
    config.delta0_ghz = delta0_ghz;
    return ModelParams(config);
}

DriveProtocol DriveProtocol::continuous_wave(double v_dc, double v_rf, double frequency_ghz,
                                             double phase) {
    require_finite(v_dc, "v_dc");
    require_finite(v_rf, "v_rf");
    require_finite(phase, "phase");
    if (v_rf < 0.0) {
        throw DomainError("v_rf must be non-negative");
    }
    if (!(frequency_ghz > 0.0) || !std::isfinite(frequency_ghz)) {
        throw DomainError("drive frequency must be positive");
    }
    return DriveProtocol(v_dc, v_rf, frequency_ghz, phase, ContinuousWave{});
}

DriveProtocol DriveProtocol::pulse(double v_dc, double v_rf, double frequency_ghz,
                                   double t_pump_ns, double phase) {
    if (std::isinf(t_pump_ns) && t_pump_ns > 0.0) {
        return continuous_wave(v_dc, v_rf, frequency_ghz, phase);
    }
    DriveProtocol cw = continuous_wave(v_dc, v_rf, frequency_ghz, phase);
    if (!(t_pump_ns >= 0.0) || !std::isfinite(t_pump_ns)) {
        throw DomainError("t_pump must be non-negative");
    }
    cw.mode_ = Pulse{t_pump_ns};
    return cw;
}

DriveProtocol DriveProtocol::linear_ramp(double v_start, double sweep_rate_v_per_ns,
                                         double duration_ns) {
    require_finite(v_start, "v_start");
    require_finite(sweep_rate_v_per_ns, "sweep_rate");
    if (!(duration_ns > 0.0) || !std::isfinite(duration_ns)) {
        throw DomainError("ramp duration must be positive");
    }
    return DriveProtocol(v_start, 0.0, 0.0, 0.0,
                         LinearRamp{v_start, sweep_rate_v_per_ns, duration_ns});
}

double DriveProtocol::voltage(double t_ns) const noexcept {
    if (const auto* ramp = std::get_if<LinearRamp>(&mode_)) {
        return ramp->v_start + ramp->sweep_rate_v_per_ns * t_ns;
    }
    if (const auto* pulse = std::get_if<Pulse>(&mode_); pulse && t_ns >= pulse->t_pump_ns) {
        return v_dc_;
    }
    return v_dc_ + v_rf_ * std::sin(kTwoPi * frequency_ * t_ns + phase_);
}

double DriveProtocol::drive_end() const noexcept {
    if (const auto* pulse = std::get_if<Pulse>(&mode_)) {
        return pulse->t_pump_ns;
    }
    return std::numeric_limits<double>::infinity();
}

double DriveProtocol::max_abs_voltage(double t_end_ns) const noexcept {
    if (const auto* ramp = std::get_if<LinearRamp>(&mode_)) {
        return std::max(std::abs(ramp->v_start),
                        std::abs(ramp->v_start + ramp->sweep_rate_v_per_ns * t_end_ns));
    }
    if (drive_end() <= 0.0) {
        return std::abs(v_dc_);
    }
    return std::abs(v_dc_) + v_rf_;
}

double displacement(const ModelParams& params, double v) {
    require_finite(v, "voltage");
    return params.lever_arm() * v;
}

double bias(const ModelParams& params, double v) {
    const double dz = displacement(params, v);
    return params.kappa() * v + params.quad_bias() * dz * dz + params.epsilon_offset();
}

double tunneling(const ModelParams& params, double dz_nm) {
    require_finite(dz_nm, "displacement");
    if (!params.include_tunneling_modulation()) {
        return params.delta0();
    }
    // Delta = 48 F and the stored coefficient is 24 alpha_F.
    return params.delta0() + 2.0 * params.alpha_f_scaled() * dz_nm;
}

PauliVector pauli_at_voltage(const ModelParams& params, double v) {
    const double dz = params.lever_arm() * v;
    const double delta = params.include_tunneling_modulation()
                             ? params.delta0() + 2.0 * params.alpha_f_scaled() * dz
                             : params.delta0();
    const double eps = params.kappa() * v + params.quad_bias() * dz * dz + params.epsilon_offset();
    return {-0.5 * delta, -0.5 * eps};
}

Eigen::Matrix2cd hamiltonian(const ModelParams& params, const DriveProtocol& protocol,
                             double t_ns) {
    if (!(t_ns >= 0.0)) {
        throw DomainError("time must be non-negative");
    }
    const double v = protocol.voltage(t_ns);
    require_finite(v, "voltage");
    const PauliVector h = pauli_at_voltage(params, v);
    Eigen::Matrix2cd m;
    m << h.z, h.x,
         h.x, -h.z;
    return m;
}

AdiabaticLevels adiabatic_levels(const ModelParams& params, double v_dc) {
    const double eps = bias(params, v_dc);
    const double delta = tunneling(params, displacement(params, v_dc));
    const double half_gap = 0.5 * std::hypot(delta, eps);
    return {-half_gap, half_gap};
}

}  // namespace lzsm
