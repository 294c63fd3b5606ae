#pragma once

#include <optional>
#include <utility>

#include "chiralgate/model.hpp"

// Closed-form infinite-chain polariton model. Momentum-like arguments are the
// dimensionless x = (k - k0) d on the branch (0, 2pi); frequencies are detunings
// in units of Gamma0.

namespace chiralgate::analytic {

struct ScatteringAmplitudes {
    Complex t_el;
    Complex t_in;
    double omega1_out = 0.0;
    double omega2_out = 0.0;
    double velocity_ratio = 1.0;  // v_out / v_in of the degenerate channel
};

// omega(x) = -(1/2) cot(x/2); poles at x = 0 mod 2pi.
double dispersion(double x);

// Branch (0, 2pi): x(omega) = pi + 2 atan(2 omega).
double inverse_dispersion(double omega);

// v(x) = 1/(4 sin^2(x/2)), units Gamma0 d.
double group_velocity(double x);

// ((i omega + 1/2)/(i omega - 1/2))^N, unit modulus.
Complex single_photon_phase(double omega, int n_emitters);

Complex t_elastic(double omega1, double omega2);

// 2i (w1-w2)^2 / ((w1+w2-i)(1+2w1^2+2w2^2)). The -i in the first factor makes
// the continuity equation exact; a real -1 there violates it at O(1).
Complex t_inelastic(double omega1, double omega2);

// Energy-conserving outgoing pair of the inelastic channel; nullopt when the
// inputs are degenerate within epsilon (the channel closes quadratically).
std::optional<std::pair<double, double>> inelastic_energies(double omega1, double omega2,
                                                            double epsilon = 1e-9);

// Second relative momentum at the same two-polariton energy.
double degenerate_momentum(double q, double K, double k0d);

// Amplitudes from the (q, K)-space two-equation solve; equals the frequency
// forms after substituting the dispersion.
std::pair<Complex, Complex> amplitudes_kq(double q, double K, double k0d);

// Inverse of arg t_elastic(w, w) = alpha on alpha in (0, 2pi).
double detuning_for_phase(double alpha);

ScatteringAmplitudes scattering_amplitudes(double omega1, double omega2);

}  // namespace chiralgate::analytic
