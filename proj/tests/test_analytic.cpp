#include "lzsm/analytic.hpp"
#include "lzsm/errors.hpp"
#include "lzsm/propagator.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace lzsm;

namespace {

ModelParams fe_mgo() { return ModelParams::fe_mgo(); }

}  // namespace

TEST_CASE("Landau-Zener probability limits") {
    CHECK(lz_probability(LZParams(0.0, 0.01)) == 1.0);
    CHECK(lz_probability(LZParams(0.05, 1e12)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lz_probability(LZParams(0.05, 1e-6)) < 1e-300);
    CHECK_THROWS_AS(LZParams(0.05, 0.0), DomainError);
    CHECK_THROWS_AS(LZParams(-0.05, 0.01), DomainError);
}

TEST_CASE("Landau-Zener probability in linear-frequency units") {
    for (double rate : {1e-3, 5.665e-3, 0.02, 0.3}) {
        const LZParams lz(0.05, rate);
        CHECK(lz_probability(lz) == doctest::Approx(oracle::landau_zener(0.05, rate)).epsilon(1e-13));
        CHECK(lz.adiabaticity() == doctest::Approx(oracle::pi * 0.0025 / (2.0 * rate)));
        CHECK(lz_probability(lz) ==
              doctest::Approx(std::exp(-2.0 * oracle::pi * lz.adiabaticity())).epsilon(1e-13));
    }
    // Half passage: pi^2 delta^2 / rate = ln 2.
    const double half_rate = oracle::pi * oracle::pi * 0.0025 / std::log(2.0);
    CHECK(lz_probability(LZParams(0.05, half_rate)) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(LZParams::rate_for_adiabaticity(0.05, 0.7) ==
          doctest::Approx(oracle::pi * 0.0025 / 1.4).epsilon(1e-14));
}

TEST_CASE("Landau-Zener inversion") {
    for (double delta : {0.01, 0.05, 0.1}) {
        for (double rate : {0.005, 0.05}) {
            const double p = oracle::landau_zener(delta, rate);
            if (p <= 0.0 || p >= 1.0) {
                continue;
            }
            CHECK(delta_from_lz_survival(p, rate) == doctest::Approx(delta).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(delta_from_lz_survival(0.0, 0.01), DomainError);
    CHECK_THROWS_AS(delta_from_lz_survival(1.0, 0.01), DomainError);
    CHECK_THROWS_AS(delta_from_lz_survival(0.5, 0.0), DomainError);
}

TEST_CASE("Bessel special values") {
    CHECK(bessel_j(0, 0.0) == 1.0);
    CHECK(bessel_j(1, 0.0) == 0.0);
    CHECK(bessel_j(7, 0.0) == 0.0);
    // First zero of J_0 is bracketed by 2.40 and 2.41.
    CHECK(oracle::bessel_series(0, 2.40) > 0.0);
    CHECK(oracle::bessel_series(0, 2.41) < 0.0);
    CHECK(bessel_j(0, 2.40) > 0.0);
    CHECK(bessel_j(0, 2.41) < 0.0);
    CHECK(bessel_j_zero(0, 1) == doctest::Approx(2.404825557695773).epsilon(1e-12));
    CHECK(bessel_j_zero(1, 1) == doctest::Approx(3.831705970207512).epsilon(1e-12));
    CHECK(bessel_j_zero(1, 2) == doctest::Approx(7.015586669815619).epsilon(1e-12));
    CHECK(std::abs(oracle::bessel_series(1, bessel_j_zero(1, 1))) < 1e-13);
    // 1.8412 is where J_1 peaks, not where it vanishes.
    CHECK(bessel_j(1, 1.8412) == doctest::Approx(0.5819).epsilon(1e-3));
    CHECK(std::abs(bessel_j(0, 1.841183781) - bessel_j(2, 1.841183781)) < 1e-9);
    CHECK_THROWS_AS(bessel_j_zero(0, 0), DomainError);
}

TEST_CASE("Bessel accuracy against independent oracles") {
    double worst = 0.0;
    for (int n = 0; n <= 60; n += 3) {
        for (double x : {0.0, 1e-3, 0.3, 0.99, 1.0, 1.7333, 2.5, 7.0, 13.3, 29.9, 55.0, 120.0,
                         480.5, 999.0}) {
            const double got = bessel_j(n, x);
            const double ref = oracle::bessel_integral(n, x);
            worst = std::max(worst, std::abs(got - ref));
        }
    }
    CHECK(worst < 1e-12);

    for (int n = 0; n <= 8; ++n) {
        for (double x = 0.0; x <= 6.0; x += 0.37) {
            CHECK(std::abs(bessel_j(n, x) - oracle::bessel_series(n, x)) < 1e-12);
        }
    }
    CHECK(std::abs(bessel_j(200, 1000.0) - oracle::bessel_integral(200, 1000.0)) < 1e-12);
    CHECK(std::abs(bessel_j(150, 20.0)) < 1e-100);
}

TEST_CASE("Bessel symmetries") {
    for (int n = 0; n <= 25; ++n) {
        for (double x : {0.4, 3.3, 17.0, 250.0}) {
            const double sign = (n % 2 == 0) ? 1.0 : -1.0;
            CHECK(bessel_j(-n, x) == doctest::Approx(sign * bessel_j(n, x)).epsilon(1e-14));
            CHECK(bessel_j(n, -x) == doctest::Approx(sign * bessel_j(n, x)).epsilon(1e-14));
        }
    }
}

TEST_CASE("Bessel recurrence residual") {
    double worst = 0.0;
    for (int n = 1; n <= 20; ++n) {
        for (double x = 0.5; x <= 50.0; x += 0.25) {
            const double r = bessel_j(n - 1, x) + bessel_j(n + 1, x) - 2.0 * n / x * bessel_j(n, x);
            worst = std::max(worst, std::abs(r));
        }
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("Bessel domain") {
    CHECK_THROWS_AS(bessel_j(201, 1.0), DomainError);
    CHECK_THROWS_AS(bessel_j(-201, 1.0), DomainError);
    CHECK_THROWS_AS(bessel_j(0, 1000.5), DomainError);
    CHECK_THROWS_AS(bessel_j(0, std::nan("")), DomainError);
}

TEST_CASE("harmonic couplings") {
    const ModelParams p = fe_mgo();
    const auto off = DriveProtocol::continuous_wave(0.1, 0.0, 0.5);
    CHECK(gamma_n(p, off, 0) == doctest::Approx(0.05));
    CHECK(gamma_n(p, off, 1) == 0.0);
    CHECK(gamma_n(p, off, -3) == 0.0);

    const auto ref_drive = DriveProtocol::continuous_wave(0.15, 0.26, 0.5);
    const double x = p.kappa() * 0.26 / 0.5;
    CHECK(gamma_n(p, ref_drive, 1) ==
          doctest::Approx(0.05 * oracle::bessel_integral(1, x)).epsilon(1e-12));

    const double node = bessel_j_zero(1, 1) * 0.5 / p.kappa();
    const auto at_node = DriveProtocol::continuous_wave(0.15, node, 0.5);
    CHECK(std::abs(gamma_n(p, at_node, 1)) < 1e-14);

    const ResonanceSpec spec = resonance_spec(p, ref_drive, 1);
    CHECK(spec.n == 1);
    CHECK(spec.omega == doctest::Approx(2.0 * oracle::pi * 0.5));
    CHECK(spec.gamma_v == doctest::Approx(p.gamma_angular()));
    CHECK(spec.v_rf == 0.26);
    const double detune = 0.5 - p.kappa() * 0.15;
    CHECK(spec.omega_n * spec.omega_n ==
          doctest::Approx(detune * detune + spec.gamma_n * spec.gamma_n).epsilon(1e-12));

    const auto ramp = DriveProtocol::linear_ramp(-0.1, 0.01, 20.0);
    CHECK_THROWS_AS(gamma_n(p, ramp, 1), DomainError);
}

TEST_CASE("harmonic cutoff") {
    const ModelParams p = fe_mgo();
    CHECK(default_harmonic_cutoff(p, DriveProtocol::continuous_wave(0.15, 0.26, 0.5)) == 13);
    CHECK(default_harmonic_cutoff(p, DriveProtocol::continuous_wave(0.0, 0.0, 0.5)) == 10);
}

TEST_CASE("resonance voltages") {
    const ModelParams p = fe_mgo();
    const auto res = resonance_voltages(p, 0.5, 3);
    REQUIRE(res.size() == 6);
    CHECK(res[0].n == -3);
    CHECK(res[5].n == 3);
    CHECK(res[3].n == 1);
    CHECK(res[3].voltage == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(res[4].voltage == doctest::Approx(0.30).epsilon(1e-12));
    for (int k = 0; k < 3; ++k) {
        CHECK(res[static_cast<std::size_t>(k)].voltage == -res[static_cast<std::size_t>(5 - k)].voltage);
    }
    ModelConfig c = p.config();
    c.epsilon_offset_ghz = 0.1;
    const auto shifted = resonance_voltages(ModelParams(c), 0.5, 1);
    CHECK(shifted[1].voltage == doctest::Approx((0.5 - 0.1) / p.kappa()));
    CHECK(shifted[0].voltage == doctest::Approx((-0.5 - 0.1) / p.kappa()));
    CHECK_THROWS_AS(resonance_voltages(p, 0.0, 1), DomainError);
}

TEST_CASE("fast-driving sum: trivial limits") {
    const ModelParams p = fe_mgo();
    const auto drive = DriveProtocol::continuous_wave(0.15, 0.26, 0.5);
    CHECK(fast_drive_probability(p, drive, 0.0, 13) == 0.0);
    CHECK_THROWS_AS(fast_drive_probability(p, drive, 1.0, 0), DomainError);
    CHECK_THROWS_AS(fast_drive_probability(p, DriveProtocol::linear_ramp(0.0, 0.1, 1.0), 1.0, 5),
                    DomainError);
}

TEST_CASE("fast-driving sum without RF is the detuned Rabi formula") {
    const ModelParams p = fe_mgo();
    for (double v : {0.01, -0.03, 0.2}) {
        const auto drive = DriveProtocol::continuous_wave(v, 0.0, 0.5);
        for (double t : {0.5, 3.0, 11.0, 40.0}) {
            CHECK(fast_drive_probability(p, drive, t, 10) ==
                  doctest::Approx(oracle::rabi(0.05, bias(p, v), t)).epsilon(1e-12));
        }
    }
}

TEST_CASE("fast-driving sum on resonance") {
    const ModelParams p = fe_mgo();
    const auto drive = DriveProtocol::continuous_wave(0.15, 0.26, 0.5);
    const double g1 = gamma_n(p, drive, 1);
    const FastDriveResult r = fast_drive_analysis(p, drive, 1.0 / (2.0 * g1), 13);
    CHECK(r.dominant_n == 1);
    CHECK(r.dominant_term == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.fast_regime);
    CHECK(r.sweep_ratio == doctest::Approx(p.kappa() * 0.26 * 2.0 * oracle::pi * 0.5 / 0.0025));
    CHECK(r.probability <= 1.0);
    CHECK(r.clamped == (r.raw_sum > 1.0 + 1e-6));
    CHECK(r.probability == doctest::Approx(std::min(r.raw_sum, 1.0)));

    const auto slow = DriveProtocol::continuous_wave(0.15, 0.001, 0.5);
    CHECK_FALSE(fast_drive_analysis(p, slow, 1.0, 13).fast_regime);
}

TEST_CASE("fast-driving sum is even in V_dc") {
    const ModelParams p = fe_mgo();
    double worst = 0.0;
    for (double v : {0.02, 0.15, 0.29, 0.41}) {
        for (double vrf : {0.1, 0.26, 0.6}) {
            for (double t : {1.0, 7.7, 18.0}) {
                const double a =
                    fast_drive_analysis(p, DriveProtocol::continuous_wave(v, vrf, 0.5), t, 20).raw_sum;
                const double b =
                    fast_drive_analysis(p, DriveProtocol::continuous_wave(-v, vrf, 0.5), t, 20).raw_sum;
                worst = std::max(worst, std::abs(a - b));
            }
        }
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("pulsed fast-driving sum freezes at t_pump") {
    const ModelParams p = fe_mgo();
    const auto pulse = DriveProtocol::pulse(0.15, 0.26, 0.5, 5.0);
    const auto cw = DriveProtocol::continuous_wave(0.15, 0.26, 0.5);
    CHECK(fast_drive_probability(p, pulse, 12.0, 13) == fast_drive_probability(p, cw, 5.0, 13));
}

TEST_CASE("fast-driving sum tracks the propagator near the first resonance") {
    const ModelParams p = fe_mgo();
    for (double v : {0.15, 0.148, 0.153}) {
        const auto drive = DriveProtocol::continuous_wave(v, 0.26, 0.5);
        IntegratorOptions opts;
        opts.sample_interval_ns = 0.1;
        const Trajectory traj = evolve(p, drive, SpinState::spin_down(), 20.0, opts);
        double worst = 0.0;
        for (const Sample& s : traj.samples) {
            const double analytic = fast_drive_probability(p, drive, s.t_ns, 13);
            worst = std::max(worst, std::abs(s.p_plus - analytic));
        }
        CHECK(worst < 0.1);
    }
}
