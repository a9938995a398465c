#include "lzsm/analytic.hpp"

#include "lzsm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lzsm {

namespace {

constexpr int kMaxBesselOrder = 200;
constexpr double kMaxBesselArgument = 1000.0;

double bessel_series(int order, double x) {
    const double half = 0.5 * x;
    double term = 1.0;
    for (int k = 1; k <= order; ++k) {
        term *= half / k;
    }
    double sum = term;
    const double q = -half * half;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * (order + k));
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) {
            break;
        }
    }
    return sum;
}

// Miller's downward recurrence normalised by J_0 + 2 sum J_2k = 1.
double bessel_miller(int order, double x) {
    const double top = std::max(static_cast<double>(order), x);
    int start = static_cast<int>(top + std::sqrt(160.0 * top)) + 20;
    start += start % 2;

    constexpr double kBig = 1e250;
    constexpr double kSmall = 1e-250;
    const double two_over_x = 2.0 / x;
    double j_above = 0.0;
    double j = 1e-300;
    double result = 0.0;
    double even_sum = 0.0;
    for (int k = start; k > 0; --k) {
        const double j_below = k * two_over_x * j - j_above;
        j_above = j;
        j = j_below;
        if (std::abs(j) > kBig) {
            j *= kSmall;
            j_above *= kSmall;
            result *= kSmall;
            even_sum *= kSmall;
        }
        // j now holds the unnormalised J_{k-1}.
        if (k - 1 == order) {
            result = j;
        }
        if ((k - 1) % 2 == 0 && k - 1 > 0) {
            even_sum += j;
        }
    }
    const double norm = 2.0 * even_sum + j;
    return result / norm;
}

}  // namespace

LZParams::LZParams(double delta_ghz, double bias_sweep_rate)
    : delta_(delta_ghz), rate_(bias_sweep_rate) {
    if (!(delta_ghz >= 0.0) || !std::isfinite(delta_ghz)) {
        throw DomainError("LZ gap must be non-negative and finite");
    }
    if (!(bias_sweep_rate > 0.0)) {
        throw DomainError("LZ sweep rate must be positive; take the adiabatic limit explicitly");
    }
}

double LZParams::adiabaticity() const noexcept {
    if (std::isinf(rate_)) {
        return 0.0;
    }
    return kPi * delta_ * delta_ / (2.0 * rate_);
}

double LZParams::rate_for_adiabaticity(double delta_ghz, double adiabaticity) {
    if (!(adiabaticity > 0.0)) {
        throw DomainError("adiabaticity must be positive");
    }
    return kPi * delta_ghz * delta_ghz / (2.0 * adiabaticity);
}

double lz_probability(const LZParams& p) {
    return std::exp(-kTwoPi * p.adiabaticity());
}

double delta_from_lz_survival(double survival, double bias_sweep_rate) {
    if (!(survival > 0.0 && survival < 1.0)) {
        throw DomainError("survival probability must lie strictly inside (0, 1)");
    }
    if (!(bias_sweep_rate > 0.0)) {
        throw DomainError("sweep rate must be positive");
    }
    return std::sqrt(-bias_sweep_rate * std::log(survival)) / kPi;
}

double bessel_j(int n, double x) {
    if (std::abs(n) > kMaxBesselOrder) {
        throw DomainError("Bessel order " + std::to_string(n) + " outside [-200, 200]");
    }
    if (!std::isfinite(x) || std::abs(x) > kMaxBesselArgument) {
        throw DomainError("Bessel argument outside [-1000, 1000]");
    }
    const int order = std::abs(n);
    double sign = 1.0;
    if (n < 0 && order % 2 == 1) {
        sign = -sign;
    }
    if (x < 0.0) {
        x = -x;
        if (order % 2 == 1) {
            sign = -sign;
        }
    }
    if (x == 0.0) {
        return order == 0 ? sign : 0.0;
    }
    if (x <= 1.0 || x * x <= order + 1.0) {
        return sign * bessel_series(order, x);
    }
    return sign * bessel_miller(order, x);
}

double bessel_j_zero(int n, int k) {
    if (k < 1) {
        throw DomainError("zero index must be >= 1");
    }
    // Bracket by a fine walk (zeros are spaced by about pi and j_{n,1} > n), then bisect.
    const double step = 0.05;
    int found = 0;
    double a = n == 0 ? step : std::max(step, static_cast<double>(std::abs(n)));
    double fa = bessel_j(n, a);
    while (a < kMaxBesselArgument) {
        const double b = a + step;
        const double fb = bessel_j(n, b);
        if (fa == 0.0 || fa * fb < 0.0) {
            if (++found == k) {
                double lo = a;
                double hi = b;
                double flo = fa;
                for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double fm = bessel_j(n, mid);
                    if ((fm < 0.0) == (flo < 0.0)) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                return 0.5 * (lo + hi);
            }
        }
        a = b;
        fa = fb;
    }
    throw DomainError("Bessel zero beyond supported argument range");
}

double gamma_n(const ModelParams& params, const DriveProtocol& protocol, int n) {
    if (protocol.is_ramp()) {
        throw DomainError("harmonic amplitudes need a periodic drive");
    }
    return params.delta0() * bessel_j(n, params.kappa() * protocol.v_rf() / protocol.frequency());
}

ResonanceSpec resonance_spec(const ModelParams& params, const DriveProtocol& protocol, int n) {
    const double g = gamma_n(params, protocol, n);
    const double eps_dc = params.kappa() * protocol.v_dc() + params.epsilon_offset();
    const double detuning = n * protocol.frequency() - eps_dc;
    return {n,
            kTwoPi * protocol.frequency(),
            params.gamma_angular(),
            protocol.v_rf(),
            g,
            std::hypot(detuning, g)};
}

int default_harmonic_cutoff(const ModelParams& params, const DriveProtocol& protocol) {
    const double reach = std::abs(params.kappa()) *
                         (std::abs(protocol.v_dc()) + protocol.v_rf()) / protocol.frequency();
    return static_cast<int>(std::ceil(reach)) + 10;
}

FastDriveResult fast_drive_analysis(const ModelParams& params, const DriveProtocol& protocol,
                                    double t_ns, int n_max) {
    if (protocol.is_ramp()) {
        throw DomainError("fast-driving formula needs a continuous-wave or pulsed drive");
    }
    if (n_max < 1) {
        throw DomainError("n_max must be >= 1");
    }
    if (!(t_ns >= 0.0)) {
        throw DomainError("time must be non-negative");
    }
    const double t = std::min(t_ns, protocol.drive_end());
    const double delta = params.delta0();
    const double f = protocol.frequency();
    const double eps_dc = params.kappa() * protocol.v_dc() + params.epsilon_offset();
    const double argument = params.kappa() * protocol.v_rf() / f;

    FastDriveResult out{};
    out.dominant_n = 0;
    for (int n = -n_max; n <= n_max; ++n) {
        const double g = delta * bessel_j(n, argument);
        if (g == 0.0) {
            continue;
        }
        const double detuning = n * f - eps_dc;
        const double omega2 = detuning * detuning + g * g;
        const double term = g * g / (2.0 * omega2) * (1.0 - std::cos(kTwoPi * std::sqrt(omega2) * t));
        out.raw_sum += term;
        if (term > out.dominant_term) {
            out.dominant_term = term;
            out.dominant_n = n;
        }
    }
    const double sweep_rate = std::abs(params.kappa()) * protocol.v_rf() * kTwoPi * f;
    out.sweep_ratio = sweep_rate / (delta * delta);
    out.fast_regime = out.sweep_ratio >= 10.0;
    out.clamped = out.raw_sum > 1.0 + 1e-6;
    out.probability = std::clamp(out.raw_sum, 0.0, 1.0);
    return out;
}

double fast_drive_probability(const ModelParams& params, const DriveProtocol& protocol,
                              double t_ns, int n_max) {
    return fast_drive_analysis(params, protocol, t_ns, n_max).probability;
}

std::vector<Resonance> resonance_voltages(const ModelParams& params, double frequency_ghz,
                                          int n_max) {
    if (!(params.kappa() > 0.0)) {
        throw DomainError("resonance voltages need a positive bias coupling");
    }
    if (!(frequency_ghz > 0.0)) {
        throw DomainError("frequency must be positive");
    }
    std::vector<Resonance> out;
    out.reserve(2 * static_cast<std::size_t>(std::max(n_max, 0)));
    for (int n = -n_max; n <= n_max; ++n) {
        if (n == 0) {
            continue;
        }
        out.push_back({n, (n * frequency_ghz - params.epsilon_offset()) / params.kappa()});
    }
    return out;
}

}  // namespace lzsm
