#include "chiralgate/disorder.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace chiralgate::disorder {

namespace {

enum : std::uint32_t { kRateStream = 1, kDetuningStream = 2, kPositionStream = 3 };

std::mt19937_64 make_stream(std::uint64_t seed, int index, std::uint32_t tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), tag};
    return std::mt19937_64(seq);
}

double uniform01(std::mt19937_64& gen) {
    return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
}

// Box-Muller; a fixed algorithm keeps draws identical across standard libraries
double standard_normal(std::mt19937_64& gen) {
    const double u = uniform01(gen);
    const double v = uniform01(gen);
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

}  // namespace

void require_valid(const DisorderSpec& spec) {
    std::vector<std::string> problems;
    if (spec.sigma_gamma_db < 0.0) problems.push_back("sigma_gamma_db must be >= 0");
    if (spec.sigma_delta < 0.0) problems.push_back("sigma_delta must be >= 0");
    if (spec.position_jitter.kind == PositionJitter::Kind::UniformSpacing &&
        !(spec.position_jitter.min_spacing > 0.0 &&
          spec.position_jitter.max_spacing >= spec.position_jitter.min_spacing))
        problems.push_back("position jitter needs 0 < min_spacing <= max_spacing");
    if (spec.n_realizations < 1) problems.push_back("n_realizations must be >= 1");
    if (!problems.empty()) {
        std::ostringstream msg;
        msg << "invalid disorder spec:";
        for (const auto& p : problems) msg << " " << p << ";";
        throw std::invalid_argument(msg.str());
    }
}

EmitterChain sample_chain(const EmitterChain& base, const DisorderSpec& spec,
                          int realization_index) {
    require_valid(spec);
    chiralgate::require_valid(base);
    EmitterChain c = base;
    const int n = c.n_emitters;
    if (spec.sigma_gamma_db > 0.0) {
        auto gen = make_stream(spec.rng_seed, realization_index, kRateStream);
        for (int mu = 0; mu < n; ++mu)
            c.rate_scales[mu] *=
                std::pow(10.0, spec.sigma_gamma_db * standard_normal(gen) / 10.0);
    }
    if (spec.sigma_delta > 0.0) {
        auto gen = make_stream(spec.rng_seed, realization_index, kDetuningStream);
        for (int mu = 0; mu < n; ++mu)
            c.detunings[mu] += spec.sigma_delta * base.gamma_tot() * standard_normal(gen);
    }
    if (spec.position_jitter.kind == PositionJitter::Kind::UniformSpacing && n > 1) {
        auto gen = make_stream(spec.rng_seed, realization_index, kPositionStream);
        const double lo = spec.position_jitter.min_spacing;
        const double hi = spec.position_jitter.max_spacing;
        for (int mu = 1; mu < n; ++mu)
            c.positions[mu] = c.positions[mu - 1] + lo + (hi - lo) * uniform01(gen);
    }
    return c;
}

DisorderSummary monte_carlo_fidelity(const EmitterChain& base,
                                     const DisorderSpec& spec,
                                     const gate::ChoiSetup& setup) {
    require_valid(spec);
    gate::ChoiSetup s = setup;
    s.pulse_left.delay += spec.delay_mismatch / base.gamma_tot();

    DisorderSummary summary;
    summary.records.reserve(spec.n_realizations);
    double f_sum = 0.0, f_sq = 0.0, r_sum = 0.0, r_sq = 0.0;
    for (int i = 0; i < spec.n_realizations; ++i) {
        s.chain = sample_chain(base, spec, i);
        const GateResult res = gate::fidelity_exact(s);
        summary.records.push_back({i, res.fidelity, res.success_probability});
        f_sum += res.fidelity;
        f_sq += res.fidelity * res.fidelity;
        r_sum += res.success_probability;
        r_sq += res.success_probability * res.success_probability;
    }
    const double n = spec.n_realizations;
    summary.mean_fidelity = f_sum / n;
    summary.mean_success = r_sum / n;
    if (spec.n_realizations > 1) {
        summary.std_fidelity = std::sqrt(
            std::max(0.0, (f_sq - n * summary.mean_fidelity * summary.mean_fidelity) /
                              (n - 1.0)));
        summary.std_success = std::sqrt(
            std::max(0.0, (r_sq - n * summary.mean_success * summary.mean_success) /
                              (n - 1.0)));
    }
    summary.sem_fidelity = summary.std_fidelity / std::sqrt(n);
    summary.sem_success = summary.std_success / std::sqrt(n);
    return summary;
}

std::vector<DelayPoint> delay_sweep(const EmitterChain& base,
                                    const gate::ChoiSetup& setup,
                                    const std::vector<double>& delays) {
    std::vector<DelayPoint> curve;
    curve.reserve(delays.size());
    gate::ChoiSetup s = setup;
    s.chain = base;
    for (const double tau : delays) {
        s.pulse_left.delay = setup.pulse_left.delay + tau / base.gamma_tot();
        const GateResult res = gate::fidelity_exact(s);
        curve.push_back({tau, res.fidelity, res.success_probability});
    }
    return curve;
}

ChiralitySweepResult chirality_sweep(const gate::ChoiSetup& templ, int n_min,
                                     int n_max, double gamma_b, double gamma_s) {
    if (n_min < 1 || n_max < n_min)
        throw std::invalid_argument("chirality_sweep: need 1 <= n_min <= n_max");
    const double k0d = templ.chain.k0d;
    if (std::abs(std::remainder(k0d, std::numbers::pi)) > 1e-9)
        throw std::invalid_argument(
            "chirality_sweep: k0d must be a multiple of pi (Bragg condition)");

    ChiralitySweepResult res;
    for (int n = n_min; n <= n_max; ++n) {
        gate::ChoiSetup s = templ;
        s.chain = EmitterChain::uniform(n, gamma_b, gamma_s, k0d);
        // bracket shrinks with chain length: longer chains prefer narrower pulses
        const double lo = 0.02, hi = 0.45 / n + 0.05;
        const gate::WidthOptimum opt =
            gate::optimize_width(s, lo, hi, gate::Method::Exact);
        res.points.push_back({n, opt.width, opt.result.fidelity,
                              opt.result.success_probability});
    }

    const int m = static_cast<int>(res.points.size());
    if (m >= 2) {
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        for (const auto& p : res.points) {
            const double x = p.n_emitters, y = std::log(p.success_probability);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        const double intercept = (sy - slope * sx) / m;
        double ss_res = 0.0, ss_tot = 0.0;
        const double y_mean = sy / m;
        for (const auto& p : res.points) {
            const double y = std::log(p.success_probability);
            const double fit = intercept + slope * p.n_emitters;
            ss_res += (y - fit) * (y - fit);
            ss_tot += (y - y_mean) * (y - y_mean);
        }
        res.log_success_slope = slope;
        res.log_success_r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    }
    res.fidelity_non_decreasing = true;
    for (int i = 1; i < m; ++i)
        if (res.points[i].fidelity < res.points[i - 1].fidelity - 1e-9)
            res.fidelity_non_decreasing = false;
    return res;
}

}  // namespace chiralgate::disorder
