#include "chiralgate/model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace chiralgate {

EmitterChain EmitterChain::uniform(int n, double gamma_b, double gamma_s, double k0d) {
    EmitterChain c;
    c.n_emitters = n;
    c.gamma_b = gamma_b;
    c.gamma_s = gamma_s;
    c.k0d = k0d;
    c.detunings.assign(std::max(n, 0), 0.0);
    c.rate_scales.assign(std::max(n, 0), 1.0);
    c.positions.resize(std::max(n, 0));
    std::iota(c.positions.begin(), c.positions.end(), 0.0);
    return c;
}

std::string EmitterChain::summary() const {
    std::ostringstream os;
    os << "N=" << n_emitters << " gamma_b=" << gamma_b << " gamma_s=" << gamma_s
       << " k0d=" << k0d << (is_perfectly_chiral() ? " (perfectly chiral)" : "");
    return os.str();
}

ValidationReport validate_chain(const EmitterChain& chain) {
    ValidationReport rep;
    auto flag = [&rep](const std::string& s) { rep.problems.push_back(s); };
    const std::size_t n = static_cast<std::size_t>(chain.n_emitters);
    if (chain.n_emitters < 1) flag("n_emitters must be >= 1");
    if (chain.gamma0 <= 0.0) flag("gamma0 must be positive");
    if (chain.gamma_b < 0.0) flag("negative backward rate");
    if (chain.gamma_s < 0.0) flag("negative side rate");
    if (chain.detunings.size() != n) flag("detunings size mismatch");
    if (chain.rate_scales.size() != n) flag("rate_scales size mismatch");
    if (chain.positions.size() != n) flag("positions size mismatch");
    for (double g : chain.rate_scales)
        if (!(g > 0.0)) { flag("non-positive rate"); break; }
    for (std::size_t i = 1; i < chain.positions.size(); ++i)
        if (!(chain.positions[i] > chain.positions[i - 1])) {
            flag("positions not increasing");
            break;
        }
    return rep;
}

void require_valid(const EmitterChain& chain) {
    ValidationReport rep = validate_chain(chain);
    if (rep.ok()) return;
    std::string msg = "invalid chain:";
    for (const auto& p : rep.problems) msg += " " + p + ";";
    throw std::invalid_argument(msg);
}

FrequencyGrid FrequencyGrid::centered(double center, double half_span, int n_points) {
    return {center - half_span, center + half_span, n_points};
}

Eigen::VectorXd FrequencyGrid::values() const {
    return Eigen::VectorXd::LinSpaced(n_points, min, max);
}

Eigen::VectorXd FrequencyGrid::trapezoid_weights() const {
    Eigen::VectorXd w = Eigen::VectorXd::Constant(n_points, step());
    w(0) *= 0.5;
    w(n_points - 1) *= 0.5;
    return w;
}

Complex PulseSpec::envelope(double omega) const {
    const double s2 = width * width;
    const double amp = std::pow(2.0 * std::numbers::pi * s2, -0.25) *
                       std::exp(-(omega - center) * (omega - center) / (4.0 * s2));
    return amp * std::exp(Complex(0.0, omega * delay));
}

Eigen::VectorXcd PulseSpec::sample(const FrequencyGrid& grid) const {
    Eigen::VectorXd w = grid.values();
    Eigen::VectorXcd out(grid.n_points);
    for (int i = 0; i < grid.n_points; ++i) out(i) = envelope(w(i));
    return out;
}

std::string PulseSpec::summary() const {
    std::ostringstream os;
    os << "center=" << center << " width=" << width << " delay=" << delay << " dir="
       << (direction == Direction::Right ? "R" : "L");
    return os.str();
}

TwoPhotonState TwoPhotonState::product(const PulseSpec& right, const PulseSpec& left,
                                       const FrequencyGrid& grid1,
                                       const FrequencyGrid& grid2) {
    TwoPhotonState st;
    st.grid1 = grid1;
    st.grid2 = grid2;
    st.amplitudes = right.sample(grid1) * left.sample(grid2).transpose();
    return st;
}

double TwoPhotonState::norm() const {
    Eigen::VectorXd w1 = grid1.trapezoid_weights();
    Eigen::VectorXd w2 = grid2.trapezoid_weights();
    return w1.dot(amplitudes.cwiseAbs2() * w2);
}

}  // namespace chiralgate
