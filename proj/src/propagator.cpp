#include "lzsm/propagator.hpp"

#include "lzsm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace lzsm {

namespace {

// Gauss-Legendre nodes and commutator-free weights of the 4th-order,
// two-exponential scheme.
const double kSqrt3 = std::sqrt(3.0);
const double kNode1 = 0.5 - kSqrt3 / 6.0;
const double kNode2 = 0.5 + kSqrt3 / 6.0;
const double kWeightA = (3.0 - 2.0 * kSqrt3) / 12.0;
const double kWeightB = (3.0 + 2.0 * kSqrt3) / 12.0;

// psi <- exp(-i 2 pi dt (x sigma_x + z sigma_z)) psi
inline void apply_exponential(SpinState& psi, double x, double z, double dt) {
    const double magnitude = std::hypot(x, z);
    if (magnitude == 0.0) {
        return;
    }
    const double theta = kTwoPi * dt * magnitude;
    const double c = std::cos(theta);
    const double s = std::sin(theta) / magnitude;
    const Complex minus_is(0.0, -s);
    const Complex a = psi.c_plus;
    const Complex b = psi.c_minus;
    psi.c_plus = c * a + minus_is * (x * b + z * a);
    psi.c_minus = c * b + minus_is * (x * a - z * b);
}

class Stepper {
public:
    Stepper(const ModelParams& params, const DriveProtocol& protocol)
        : params_(params), protocol_(protocol) {}

    void step(SpinState& psi, double t, double h) const {
        const PauliVector h1 = pauli_at_voltage(params_, protocol_.voltage(t + kNode1 * h));
        const PauliVector h2 = pauli_at_voltage(params_, protocol_.voltage(t + kNode2 * h));
        apply_exponential(psi, kWeightB * h1.x + kWeightA * h2.x, kWeightB * h1.z + kWeightA * h2.z,
                          h);
        apply_exponential(psi, kWeightA * h1.x + kWeightB * h2.x, kWeightA * h1.z + kWeightB * h2.z,
                          h);
    }

private:
    const ModelParams& params_;
    const DriveProtocol& protocol_;
};

// Upper bound of the level splitting sqrt(Delta^2 + eps^2) for |V| <= v_max.
double max_splitting(const ModelParams& params, double v_max) {
    const double dz = params.lever_arm() * v_max;
    const double eps = std::abs(params.kappa()) * v_max + std::abs(params.quad_bias()) * dz * dz +
                       std::abs(params.epsilon_offset());
    double delta = params.delta0();
    if (params.include_tunneling_modulation()) {
        delta += 2.0 * std::abs(params.alpha_f_scaled()) * dz;
    }
    return std::hypot(delta, eps);
}

double nominal_step(const ModelParams& params, const DriveProtocol& protocol, double t_end,
                    int steps_per_period) {
    const double splitting = max_splitting(params, protocol.max_abs_voltage(t_end));
    double rate = splitting;
    double dt_limit = std::numeric_limits<double>::infinity();
    if (const auto* ramp = std::get_if<LinearRamp>(&protocol.mode())) {
        const double bias_rate = std::abs(params.kappa() * ramp->sweep_rate_v_per_ns);
        if (bias_rate > 0.0) {
            // Keep |d eps| per step below Delta / 10 through the crossing.
            dt_limit = params.delta0() / (10.0 * bias_rate);
        }
    } else if (protocol.drive_end() > 0.0 && protocol.v_rf() > 0.0) {
        rate = std::max(rate, protocol.frequency());
    }
    return std::min(1.0 / (steps_per_period * rate), dt_limit);
}

double default_sample_interval(const DriveProtocol& protocol, double t_end) {
    if (const auto* ramp = std::get_if<LinearRamp>(&protocol.mode())) {
        return ramp->duration_ns / 1000.0;
    }
    if (protocol.frequency() > 0.0) {
        return 1.0 / (20.0 * protocol.frequency());
    }
    return t_end / 1000.0;
}

std::vector<double> breakpoints(const DriveProtocol& protocol, double t_end, double interval,
                                std::vector<bool>& is_sample) {
    std::vector<double> points;
    for (long k = 0;; ++k) {
        const double t = static_cast<double>(k) * interval;
        if (t >= t_end * (1.0 - 1e-12)) {
            break;
        }
        points.push_back(t);
    }
    points.push_back(t_end);
    is_sample.assign(points.size(), true);

    const double t_switch = protocol.drive_end();
    if (t_switch > 0.0 && t_switch < t_end &&
        !std::binary_search(points.begin(), points.end(), t_switch)) {
        const auto it = std::upper_bound(points.begin(), points.end(), t_switch);
        const auto idx = static_cast<std::size_t>(it - points.begin());
        points.insert(it, t_switch);
        is_sample.insert(is_sample.begin() + static_cast<std::ptrdiff_t>(idx), false);
    }
    return points;
}

Sample make_sample(double t, const SpinState& psi) {
    const double p_plus = psi.p_plus();
    const double p_minus = psi.p_minus();
    return {t, 2.0 * (p_plus - p_minus), p_plus, p_minus};
}

Trajectory integrate_fixed(const ModelParams& params, const DriveProtocol& protocol,
                           const SpinState& psi0, double t_end, int steps_per_period,
                           double interval, double tolerance) {
    const double dt_nominal = nominal_step(params, protocol, t_end, steps_per_period);
    if (!(dt_nominal > 1e-12 * t_end) || !(dt_nominal > 1e-12)) {
        throw IntegrationError("step size underflow", 0.0);
    }

    std::vector<bool> is_sample;
    const std::vector<double> points = breakpoints(protocol, t_end, interval, is_sample);

    Trajectory traj{{}, protocol, params, psi0};
    traj.samples.reserve(points.size());
    SpinState psi = psi0;
    traj.samples.push_back(make_sample(0.0, psi));

    const Stepper stepper(params, protocol);
    for (std::size_t i = 1; i < points.size(); ++i) {
        const double a = points[i - 1];
        const double b = points[i];
        const double span = b - a;
        const long n_sub = std::max(1L, static_cast<long>(std::ceil(span / dt_nominal - 1e-9)));
        const double h = span / static_cast<double>(n_sub);
        for (long j = 0; j < n_sub; ++j) {
            stepper.step(psi, a + static_cast<double>(j) * h, h);
        }
        if (std::abs(psi.norm() - 1.0) > 10.0 * tolerance) {
            throw IntegrationError("norm drift beyond tolerance at t = " + std::to_string(b) + " ns",
                                   a);
        }
        if (is_sample[i]) {
            traj.samples.push_back(make_sample(b, psi));
        }
    }
    traj.final_state = psi;
    return traj;
}

double state_distance(const SpinState& a, const SpinState& b) {
    return std::sqrt(std::norm(a.c_plus - b.c_plus) + std::norm(a.c_minus - b.c_minus));
}

double last_agreeing_time(const Trajectory& coarse, const Trajectory& fine, double tolerance) {
    double last = 0.0;
    const std::size_t n = std::min(coarse.samples.size(), fine.samples.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(coarse.samples[i].sz - fine.samples[i].sz) > tolerance) {
            break;
        }
        last = coarse.samples[i].t_ns;
    }
    return last;
}

SpinState eigenvector(double x, double z, double sign) {
    // Eigenvector of n.sigma with eigenvalue `sign` for n = (x, 0, z)/|.|.
    const double magnitude = std::hypot(x, z);
    if (magnitude == 0.0) {
        return SpinState::spin_up();
    }
    const double nx = x / magnitude;
    const double nz = z / magnitude;
    double a;
    double b;
    if (sign * nz >= 0.0) {
        a = nz + sign;
        b = nx;
    } else {
        a = nx;
        b = sign - nz;
    }
    const double norm = std::hypot(a, b);
    return {a / norm, b / norm};
}

}  // namespace

double expectation_sz(const SpinState& psi) {
    if (std::abs(psi.norm() - 1.0) > 1e-6) {
        throw DomainError("state is not normalized");
    }
    return 2.0 * (psi.p_plus() - psi.p_minus());
}

SpinState adiabatic_ground_state(const ModelParams& params, double v) {
    const PauliVector h = pauli_at_voltage(params, v);
    return eigenvector(h.x, h.z, -1.0);
}

SpinState adiabatic_excited_state(const ModelParams& params, double v) {
    const PauliVector h = pauli_at_voltage(params, v);
    return eigenvector(h.x, h.z, 1.0);
}

SpinState default_initial_state(const ModelParams& params, const DriveProtocol& protocol) {
    return adiabatic_ground_state(params, protocol.voltage(0.0));
}

Trajectory evolve(const ModelParams& params, const DriveProtocol& protocol, const SpinState& psi0,
                  double t_end_ns, const IntegratorOptions& opts) {
    if (!(t_end_ns > 0.0) || !std::isfinite(t_end_ns)) {
        throw DomainError("t_end must be positive and finite");
    }
    if (opts.steps_per_period < 32) {
        throw DomainError("steps_per_period must be at least 32");
    }
    if (!(opts.tolerance > 0.0)) {
        throw DomainError("tolerance must be positive");
    }
    if (std::abs(psi0.norm() - 1.0) > 1e-6) {
        throw DomainError("initial state is not normalized");
    }
    const double interval = opts.sample_interval_ns > 0.0
                                ? opts.sample_interval_ns
                                : default_sample_interval(protocol, t_end_ns);

    const double norm0 = psi0.norm();
    const SpinState start{psi0.c_plus / norm0, psi0.c_minus / norm0};

    Trajectory coarse = integrate_fixed(params, protocol, start, t_end_ns, opts.steps_per_period,
                                        interval, opts.tolerance);
    if (!opts.adaptive) {
        return coarse;
    }
    int steps = opts.steps_per_period;
    double last_good = 0.0;
    for (int refinement = 0; refinement < opts.max_refinements; ++refinement) {
        steps *= 2;
        Trajectory fine =
            integrate_fixed(params, protocol, start, t_end_ns, steps, interval, opts.tolerance);
        if (state_distance(coarse.final_state, fine.final_state) < opts.tolerance) {
            return fine;
        }
        last_good = last_agreeing_time(coarse, fine, opts.tolerance);
        coarse = std::move(fine);
    }
    throw IntegrationError("step halving did not reach tolerance", last_good);
}

double free_ringing_period(const ModelParams& params, double v_dc) {
    const double eps = bias(params, v_dc);
    const double delta = tunneling(params, displacement(params, v_dc));
    const double splitting = std::hypot(delta, eps);
    if (splitting == 0.0) {
        throw DomainError("degenerate levels: no free precession");
    }
    return 1.0 / splitting;
}

}  // namespace lzsm
