#pragma once

#include <optional>

#include "chiralgate/model.hpp"

// Gate-level metrics for the passive two-photon phase gate: Choi fidelity and
// heralded success probability, filtered and unfiltered, from either the
// infinite-chain analytic transmission or the exact finite-N scatterer. The
// photonic qubit is a time-bin pair (early/late), so of the four Choi branches
// only the both-photons-early one scatters nonlinearly; the reference for that
// branch is the product of the individually dispersed single-photon outputs.

namespace chiralgate::gate {

struct FrequencyWindow {
    double center = 0.0;
    double half_width = 0.0;

    bool contains(double omega) const {
        return omega >= center - half_width && omega <= center + half_width;
    }
};

struct ChoiSetup {
    double target_phase = std::numbers::pi;
    PulseSpec pulse_right;
    PulseSpec pulse_left;
    EmitterChain chain;
    std::optional<FrequencyWindow> filter;  // per-photon herald window
    int grid_points = 257;                  // quadrature grid per axis
    double grid_span_sigmas = 8.0;          // half-span in units of pulse width
};

// Uniform-chain setup with both pulses centered at the detuning realizing the
// target phase and a default +-6 sigma herald window.
ChoiSetup standard_setup(int n_emitters, double width,
                         double target_phase = std::numbers::pi,
                         double filter_sigmas = 6.0);

// Copy of `templ` with both pulse widths set to `width`; a filter window keeps
// its half_width/width ratio.
ChoiSetup with_width(const ChoiSetup& templ, double width);

// Ideal-chain dispersion phase accumulated by an elastically transmitted pair.
Complex reference_phase(double omega1, double omega2, const EmitterChain& chain);

// Infinite-chain result from 2D quadrature of the elastic transmission against
// the pulse spectral densities; errors out if grid doubling moves the answer.
GateResult fidelity_analytic(const ChoiSetup& setup);

// Finite-N result from the exact two-photon scatterer.
GateResult fidelity_exact(const ChoiSetup& setup);

enum class Method { Analytic, Exact };

struct WidthOptimum {
    double width = 0.0;
    GateResult result;
    bool at_boundary = false;
};

// Golden-section minimization of 1-F over the pulse width (tolerance 1e-3);
// falls back to an endpoint with a boundary flag when no interior minimum wins.
WidthOptimum optimize_width(const ChoiSetup& templ, double width_min,
                            double width_max, Method method = Method::Exact);

}  // namespace chiralgate::gate
