#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "chiralgate/model.hpp"

using namespace chiralgate;

TEST_CASE("uniform chain carries derived rates") {
    const auto chain = EmitterChain::uniform(4, 0.25, 0.05);
    CHECK(chain.n_emitters == 4);
    CHECK(chain.gamma_tot() == doctest::Approx(1.30));
    CHECK(chain.beta() == doctest::Approx(1.25 / 1.30));
    CHECK(chain.directionality() == doctest::Approx(0.75 / 1.25));
    CHECK_FALSE(chain.is_perfectly_chiral());
    CHECK(EmitterChain::uniform(2).is_perfectly_chiral());
    CHECK(chain.positions[3] == doctest::Approx(3.0));
    CHECK(chain.detunings.size() == 4);
    CHECK(chain.rate_scales.size() == 4);
}

TEST_CASE("chain validation collects every problem") {
    EmitterChain bad = EmitterChain::uniform(3);
    bad.gamma_b = -0.1;
    bad.rate_scales = {1.0, 0.0, 1.0};
    bad.positions = {0.0, 2.0, 2.0};
    const auto report = validate_chain(bad);
    CHECK_FALSE(report.ok());
    CHECK(report.problems.size() == 3);
    CHECK_THROWS_AS(require_valid(bad), std::invalid_argument);

    bad.detunings.resize(2);
    CHECK(validate_chain(bad).problems.size() == 4);
    CHECK(validate_chain(EmitterChain::uniform(1)).ok());
}

TEST_CASE("frequency grid quadrature") {
    const auto grid = FrequencyGrid::centered(0.3, 0.5, 11);
    CHECK(grid.min == doctest::Approx(-0.2));
    CHECK(grid.max == doctest::Approx(0.8));
    CHECK(grid.step() == doctest::Approx(0.1));
    const auto v = grid.values();
    CHECK(v.size() == 11);
    CHECK(v[0] == doctest::Approx(-0.2));
    CHECK(v[10] == doctest::Approx(0.8));
    // trapezoid weights integrate a constant to the span
    CHECK(grid.trapezoid_weights().sum() == doctest::Approx(1.0));
}

TEST_CASE("pulse envelope is unit normalized with a pure delay phase") {
    const PulseSpec pulse{0.2, 0.07, 3.5, Direction::Left};
    const auto grid = FrequencyGrid::centered(0.2, 10 * 0.07, 2001);
    const auto psi = pulse.sample(grid);
    const auto w = grid.trapezoid_weights();
    double norm = 0.0;
    for (int i = 0; i < psi.size(); ++i) norm += w[i] * std::norm(psi[i]);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-9));

    const PulseSpec still{0.2, 0.07, 0.0, Direction::Left};
    for (double omega : {-0.1, 0.2, 0.45}) {
        const Complex ratio = pulse.envelope(omega) / still.envelope(omega);
        CHECK(std::abs(ratio) == doctest::Approx(1.0));
        CHECK(std::arg(ratio) == doctest::Approx(std::remainder(omega * 3.5, 2 * std::numbers::pi)));
    }
}

TEST_CASE("product state norm matches the quadrature of its factors") {
    const PulseSpec right{0.0, 0.1, 0.0, Direction::Right};
    const PulseSpec left{0.05, 0.1, 1.0, Direction::Left};
    const auto grid = FrequencyGrid::centered(0.02, 0.9, 301);
    const auto state = TwoPhotonState::product(right, left, grid, grid);
    CHECK(state.amplitudes.rows() == 301);
    CHECK(state.norm() == doctest::Approx(1.0).epsilon(1e-6));
}
