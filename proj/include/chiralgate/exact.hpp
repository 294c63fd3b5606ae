#pragma once

#include <array>
#include <vector>

#include "chiralgate/model.hpp"

// Exact finite-N scattering from the cascaded non-Hermitian effective
// Hamiltonian in the single- and double-excitation sectors, with input-output
// readout. Level convention: level 0 = e (right-coupled at rate gamma0*scale,
// left at gamma_b*scale), level 1 = f (mirrored). Side loss gamma_s enters the
// diagonal only. An independent time-domain RK4 oracle cross-checks the
// frequency-domain solver.

namespace chiralgate::exact {

enum class Sector { Single, Double };

struct EffectiveHamiltonian {
    Sector sector = Sector::Single;
    int dimension = 0;
    Eigen::MatrixXcd matrix;
    // Single sector: basis index j = 2*emitter + level.
    // Double sector: rows of {mu, level_mu, nu, level_nu} with mu < nu; under
    // perfect chirality only mixed e/f assignments survive (photon-number
    // conservation per direction).
    std::vector<std::array<int, 4>> pair_basis;
};

EffectiveHamiltonian build_hamiltonian(const EmitterChain& chain, Sector sector);

struct ScatterOutput {
    TwoPhotonState state;
    bool grid_coarse_warning = false;  // fewer than 16 points across the pulse
};

// Single-photon S-matrix sampled on a grid for one injection direction.
struct SinglePhotonS {
    Direction direction = Direction::Right;
    FrequencyGrid grid;
    Eigen::VectorXcd transmission;
    Eigen::VectorXcd reflection;  // identically zero under perfect chirality
};

SinglePhotonS single_photon_s(const EmitterChain& chain, Direction direction,
                              const FrequencyGrid& grid);

class ScatteringEngine {
  public:
    explicit ScatteringEngine(const EmitterChain& chain);

    const EmitterChain& chain() const { return chain_; }
    int single_dim() const { return d1_; }
    int double_dim() const { return d2_; }

    // Single-photon S-matrix elements for a photon injected in `in`.
    Complex transmission(double omega, Direction in) const;
    Complex reflection(double omega, Direction in) const;

    // Connected amplitude T(omega1_out; omega1_in, omega2_in) for one
    // right-moving (omega1) and one left-moving (omega2) photon; the second
    // output frequency is fixed by energy conservation.
    Complex two_photon_kernel(double omega1_in, double omega2_in, double omega1_out) const;

    // Full S-matrix action on a two-photon amplitude over a shared uniform
    // grid: disconnected product + exchange reflection + energy-shell integral
    // of the connected kernel along anti-diagonals.
    ScatterOutput scatter_state(const TwoPhotonState& psi_in) const;

  private:
    EmitterChain chain_;
    int d1_ = 0, d2_ = 0;
    Eigen::MatrixXcd h1_, h2_;
    std::vector<std::array<int, 4>> basis2_;
    Eigen::VectorXcd in_r_, in_l_, out_r_, out_l_;
    Eigen::MatrixXcd lift_r_, lift_l_;  // d2 x d1
    Eigen::MatrixXcd emit_r_, emit_l_;  // d1 x d2
};

struct OracleOptions {
    double t_start = -60.0;
    double t_end = 260.0;
    double dt = 0.01;
    bool check_convergence = false;  // re-run at dt/2, throw if L2 change > tol
    double convergence_tol = 1e-5;
};

struct OracleResult {
    TwoPhotonState state;
    Eigen::VectorXcd t_right;  // single-photon transmission from the time trace
    Eigen::VectorXcd t_left;
};

// Drives the excitation hierarchy with the pulse envelopes (RK4), reads out
// emission via two-time response, and Fourier-transforms to the given grid.
OracleResult time_domain_oracle(const EmitterChain& chain, const PulseSpec& right,
                                const PulseSpec& left, const FrequencyGrid& grid,
                                const OracleOptions& options = {});

}  // namespace chiralgate::exact
