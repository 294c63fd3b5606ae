#include "chiralgate/analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace chiralgate::analytic {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

void check_off_pole(double x, const char* who) {
    if (std::abs(std::sin(0.5 * x)) < 1e-12)
        throw std::domain_error(std::string(who) + ": momentum at dispersion pole");
}
}  // namespace

double dispersion(double x) {
    check_off_pole(x, "dispersion");
    return -0.5 * std::cos(0.5 * x) / std::sin(0.5 * x);
}

double inverse_dispersion(double omega) { return kPi + 2.0 * std::atan(2.0 * omega); }

double group_velocity(double x) {
    check_off_pole(x, "group_velocity");
    const double s = std::sin(0.5 * x);
    return 0.25 / (s * s);
}

Complex single_photon_phase(double omega, int n_emitters) {
    const Complex base = (kI * omega + 0.5) / (kI * omega - 0.5);
    return std::pow(base, n_emitters);
}

Complex t_elastic(double omega1, double omega2) {
    const double den = 1.0 + 2.0 * omega1 * omega1 + 2.0 * omega2 * omega2;
    return 1.0 - 2.0 * (1.0 - kI * (omega1 + omega2)) / den;
}

Complex t_inelastic(double omega1, double omega2) {
    const double den = 1.0 + 2.0 * omega1 * omega1 + 2.0 * omega2 * omega2;
    const Complex lead = omega1 + omega2 - kI;
    if (std::abs(lead * den) < 1e-12) throw std::domain_error("t_inelastic: pole");
    const double d = omega1 - omega2;
    return 2.0 * kI * d * d / (lead * den);
}

std::optional<std::pair<double, double>> inelastic_energies(double omega1, double omega2,
                                                            double epsilon) {
    if (std::abs(omega1 - omega2) <= epsilon) return std::nullopt;
    const double s = omega1 + omega2;
    const double w1p = (1.0 + 2.0 * s * omega2) / (2.0 * (omega2 - omega1));
    return std::make_pair(w1p, s - w1p);
}

double degenerate_momentum(double q, double K, double k0d) {
    const double energy = dispersion(q + K - k0d) + dispersion(q - K - k0d);
    return 2.0 * k0d + kPi + 2.0 * std::atan(energy) - q;
}

std::pair<Complex, Complex> amplitudes_kq(double q, double K, double k0d) {
    auto a = [](double kappa) -> Complex {
        const Complex den = std::exp(kI * kappa) - 1.0;
        if (std::abs(den) < 1e-12) throw std::domain_error("amplitudes_kq: pole");
        return 1.0 / den;
    };
    const double qp = degenerate_momentum(q, K, k0d);
    const double x1 = q + K - k0d, x2 = q - K - k0d;
    const double x1p = qp + K - k0d, x2p = qp - K - k0d;
    Eigen::Matrix2cd A;
    A << 1.0 + a(x2), 1.0 + a(x2p), 1.0 + a(x1), 1.0 + a(x1p);
    Eigen::Vector2cd b(a(x2), a(x1));
    Eigen::Vector2cd sol = A.partialPivLu().solve(b);
    return {sol(0), sol(1)};
}

double detuning_for_phase(double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0 * kPi))
        throw std::domain_error("detuning_for_phase: alpha outside (0, 2pi)");
    return 0.5 / std::tan(0.5 * alpha);
}

ScatteringAmplitudes scattering_amplitudes(double omega1, double omega2) {
    ScatteringAmplitudes out;
    out.t_el = t_elastic(omega1, omega2);
    auto pair = inelastic_energies(omega1, omega2);
    if (!pair) {
        out.t_in = 0.0;
        out.omega1_out = omega1;
        out.omega2_out = omega2;
        out.velocity_ratio = 1.0;
        return out;
    }
    out.t_in = t_inelastic(omega1, omega2);
    out.omega1_out = pair->first;
    out.omega2_out = pair->second;
    const double vin = group_velocity(inverse_dispersion(omega1)) +
                       group_velocity(inverse_dispersion(omega2));
    const double vout = group_velocity(inverse_dispersion(out.omega1_out)) +
                        group_velocity(inverse_dispersion(out.omega2_out));
    out.velocity_ratio = vout / vin;
    return out;
}

}  // namespace chiralgate::analytic
