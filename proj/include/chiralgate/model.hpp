#pragma once

#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

// Shared domain types. Unit conventions: all rates and frequencies in units of
// the forward chiral rate Gamma0, times in 1/Gamma0, positions in units of the
// nominal lattice spacing d. gamma0 is carried only to document physical scale.

namespace chiralgate {

using Complex = std::complex<double>;

struct EmitterChain {
    int n_emitters = 1;
    double gamma0 = 1.0;
    double gamma_b = 0.0;           // backward emission rate, units gamma0
    double gamma_s = 0.0;           // side/loss rate, units gamma0
    double k0d = std::numbers::pi;  // optical phase per nominal spacing
    std::vector<double> detunings;    // per-emitter resonance offsets
    std::vector<double> rate_scales;  // per-emitter total-rate multipliers
    std::vector<double> positions;    // monotonically increasing, units d

    static EmitterChain uniform(int n, double gamma_b = 0.0, double gamma_s = 0.0,
                                double k0d = std::numbers::pi);

    double gamma_tot() const { return 1.0 + gamma_b + gamma_s; }
    double beta() const { return (1.0 + gamma_b) / gamma_tot(); }
    double directionality() const { return (1.0 - gamma_b) / (1.0 + gamma_b); }
    bool is_perfectly_chiral() const { return gamma_b == 0.0 && gamma_s == 0.0; }
    std::string summary() const;
};

struct ValidationReport {
    std::vector<std::string> problems;
    bool ok() const { return problems.empty(); }
};

ValidationReport validate_chain(const EmitterChain& chain);

// Throws std::invalid_argument listing every violation.
void require_valid(const EmitterChain& chain);

struct FrequencyGrid {
    double min = -1.0;
    double max = 1.0;
    int n_points = 2;

    static FrequencyGrid centered(double center, double half_span, int n_points);
    double step() const { return (max - min) / (n_points - 1); }
    Eigen::VectorXd values() const;
    Eigen::VectorXd trapezoid_weights() const;
};

enum class Direction { Right, Left };

struct PulseSpec {
    double center = 0.0;  // detuning of the carrier
    double width = 0.05;  // spectral standard deviation of |psi|^2
    double delay = 0.0;   // arrival-time offset, enters as exp(i omega tau)
    Direction direction = Direction::Right;

    // psi(omega) = (2 pi sigma^2)^{-1/4} exp(-(omega-center)^2/(4 sigma^2)) e^{i omega tau}
    Complex envelope(double omega) const;
    Eigen::VectorXcd sample(const FrequencyGrid& grid) const;
    std::string summary() const;
};

struct TwoPhotonState {
    FrequencyGrid grid1, grid2;
    Eigen::MatrixXcd amplitudes;  // (n1, n2) over (omega1, omega2)

    static TwoPhotonState product(const PulseSpec& right, const PulseSpec& left,
                                  const FrequencyGrid& grid1, const FrequencyGrid& grid2);
    double norm() const;  // trapezoid quadrature of |psi|^2 over both axes
};

struct GateMetadata {
    std::string method;  // "analytic" | "exact"
    std::string chain_summary;
    std::string pulse_summary;
    bool pulses_mismatched = false;
    bool filter_contains_input = true;  // >= 99.99% of input inside the window
    bool width_at_boundary = false;     // optimizer hit the search boundary
    bool grid_coarse = false;           // scatter grid underresolves the pulse
};

struct GateResult {
    double fidelity = 0.0;
    double success_probability = 0.0;
    double fidelity_unfiltered = 0.0;
    double target_phase = std::numbers::pi;
    GateMetadata metadata;
};

}  // namespace chiralgate
