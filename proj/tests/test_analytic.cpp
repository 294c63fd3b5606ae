#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "chiralgate/analytic.hpp"

using namespace chiralgate;
using std::numbers::pi;

TEST_CASE("dispersion and its inverse agree on the open branch") {
    CHECK(analytic::dispersion(pi) == doctest::Approx(0.0));
    for (double x : {0.3, 1.2, pi, 4.0, 6.0}) {
        CHECK(analytic::inverse_dispersion(analytic::dispersion(x)) ==
              doctest::Approx(x).epsilon(1e-12));
    }
    // steep near the band edges, slowest mid-band
    CHECK(analytic::group_velocity(pi) == doctest::Approx(0.25));
    CHECK(analytic::group_velocity(0.1) > 10.0);
}

TEST_CASE("single photon phase is a pure phase") {
    for (int n : {1, 5, 12}) {
        for (double w : {-1.7, -0.2, 0.0, 0.4, 2.3}) {
            const Complex p = analytic::single_photon_phase(w, n);
            CHECK(std::abs(p) == doctest::Approx(1.0).epsilon(1e-13));
        }
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        CHECK(analytic::single_photon_phase(0.0, n).real() == doctest::Approx(sign));
    }
}

TEST_CASE("elastic amplitude: resonance value, symmetry, far-detuned limit") {
    CHECK(analytic::t_elastic(0.0, 0.0).real() == doctest::Approx(-1.0));
    CHECK(analytic::t_elastic(0.0, 0.0).imag() == doctest::Approx(0.0));
    for (double w1 : {-0.4, 0.15})
        for (double w2 : {-0.05, 0.3}) {
            CHECK(std::abs(analytic::t_elastic(w1, w2) - analytic::t_elastic(w2, w1)) <
                  1e-15);
        }
    CHECK(std::abs(analytic::t_elastic(40.0, 41.0) - Complex(1.0, 0.0)) < 0.1);
}

TEST_CASE("two-photon flux continuity") {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    double worst = 0.0;
    for (int i = 0; i < 5000; ++i) {
        const auto s = analytic::scattering_amplitudes(u(gen), u(gen));
        const double res =
            std::norm(s.t_el) + std::norm(s.t_in) * s.velocity_ratio - 1.0;
        worst = std::max(worst, std::abs(res));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("inelastic channel closes quadratically at degeneracy") {
    CHECK_FALSE(analytic::inelastic_energies(0.3, 0.3).has_value());
    const auto pair = analytic::inelastic_energies(0.1, 0.5);
    REQUIRE(pair.has_value());
    // same total energy, distinct frequencies
    CHECK(pair->first + pair->second == doctest::Approx(0.6).epsilon(1e-10));
    CHECK(std::abs(pair->first - pair->second) > 1e-6);
    CHECK(std::abs(analytic::t_inelastic(0.2, 0.2)) < 1e-15);
}

// mean momentum q, half-difference K: the individual momenta are q +- K - k0d
TEST_CASE("degenerate momentum conserves the two-polariton energy") {
    const double k0d = pi;
    for (double q : {0.4, 1.1})
        for (double K : {0.3, 0.9}) {
            const double q2 = analytic::degenerate_momentum(q, K, k0d);
            const double e1 = analytic::dispersion(q + K - k0d) + analytic::dispersion(q - K - k0d);
            const double e2 = analytic::dispersion(q2 + K - k0d) + analytic::dispersion(q2 - K - k0d);
            CHECK(e1 == doctest::Approx(e2).epsilon(1e-10));
        }
}

TEST_CASE("momentum-space amplitudes match the frequency forms") {
    const double k0d = pi;
    for (double q : {0.35, 0.9, 1.4})
        for (double K : {0.3, 0.8, 1.3}) {
            const double w1 = analytic::dispersion(q + K - k0d);
            const double w2 = analytic::dispersion(q - K - k0d);
            const auto [t_el, t_in] = analytic::amplitudes_kq(q, K, k0d);
            CHECK(std::abs(t_el - analytic::t_elastic(w1, w2)) < 1e-10);
            CHECK(std::abs(t_in - analytic::t_inelastic(w1, w2)) < 1e-10);
        }
}

TEST_CASE("detuning realizes the requested nonlinear phase") {
    CHECK(analytic::detuning_for_phase(pi) == doctest::Approx(0.0));
    for (double alpha : {0.3 * pi, 0.6 * pi, pi, 1.4 * pi}) {
        const double w = analytic::detuning_for_phase(alpha);
        double phase = std::arg(analytic::t_elastic(w, w));
        if (phase < 0) phase += 2 * pi;
        CHECK(phase == doctest::Approx(alpha).epsilon(1e-10));
    }
}
