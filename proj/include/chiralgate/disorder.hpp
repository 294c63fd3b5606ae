#pragma once

#include <cstdint>
#include <vector>

#include "chiralgate/gate.hpp"
#include "chiralgate/model.hpp"

// Monte Carlo studies of fabrication and operation imperfections: per-emitter
// rate fluctuations on the decibel scale, detuning disorder, random placement,
// and pulse arrival-time mismatch. Draws come from counter-based streams keyed
// by (seed, realization index, parameter), so realizations are reproducible and
// order independent.

namespace chiralgate::disorder {

struct PositionJitter {
    enum class Kind { None, UniformSpacing };
    Kind kind = Kind::None;
    double min_spacing = 0.5;  // units of the nominal spacing d
    double max_spacing = 1.5;
};

struct DisorderSpec {
    double sigma_gamma_db = 0.0;  // std of per-emitter rate fluctuation, dB
    double sigma_delta = 0.0;     // std of detuning, units gamma_tot
    PositionJitter position_jitter;
    double delay_mismatch = 0.0;  // left-pulse delay, units 1/gamma_tot
    int n_realizations = 1;
    std::uint64_t rng_seed = 0;
};

// Throws std::invalid_argument listing every violation.
void require_valid(const DisorderSpec& spec);

EmitterChain sample_chain(const EmitterChain& base, const DisorderSpec& spec,
                          int realization_index);

struct RealizationRecord {
    int index = 0;
    double fidelity = 0.0;
    double success_probability = 0.0;
};

struct DisorderSummary {
    double mean_fidelity = 0.0;
    double std_fidelity = 0.0;
    double sem_fidelity = 0.0;
    double mean_success = 0.0;
    double std_success = 0.0;
    double sem_success = 0.0;
    std::vector<RealizationRecord> records;
};

// Averages gate::fidelity_exact over sampled chains; the setup's chain field is
// replaced per realization and delay_mismatch is added to the left pulse.
DisorderSummary monte_carlo_fidelity(const EmitterChain& base,
                                     const DisorderSpec& spec,
                                     const gate::ChoiSetup& setup);

struct DelayPoint {
    double delay = 0.0;  // units of 1/gamma_tot
    double fidelity = 0.0;
    double success_probability = 0.0;
};

std::vector<DelayPoint> delay_sweep(const EmitterChain& base,
                                    const gate::ChoiSetup& setup,
                                    const std::vector<double>& delays);

struct ChiralityPoint {
    int n_emitters = 0;
    double width = 0.0;  // optimized pulse width
    double fidelity = 0.0;
    double success_probability = 0.0;
};

struct ChiralitySweepResult {
    std::vector<ChiralityPoint> points;
    double log_success_slope = 0.0;  // least-squares slope of ln R versus N
    double log_success_r2 = 0.0;
    bool fidelity_non_decreasing = false;
};

// Per-N width-optimized metrics for a partially chiral chain; requires k0d at a
// multiple of pi to stay off the Bragg condition.
ChiralitySweepResult chirality_sweep(const gate::ChoiSetup& templ, int n_min,
                                     int n_max, double gamma_b, double gamma_s);

}  // namespace chiralgate::disorder
