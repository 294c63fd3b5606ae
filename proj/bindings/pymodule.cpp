#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "chiralgate/analytic.hpp"
#include "chiralgate/disorder.hpp"
#include "chiralgate/exact.hpp"
#include "chiralgate/gate.hpp"
#include "chiralgate/model.hpp"

#ifndef CHIRALGATE_VERSION
#define CHIRALGATE_VERSION "0.0.0"
#endif

namespace py = pybind11;
using namespace chiralgate;

PYBIND11_MODULE(_core, m) {
    m.doc() = "two-photon phase gate on a chiral waveguide: analytic model, exact "
              "finite-N scattering, gate metrics, disorder Monte Carlo";
    m.attr("__version__") = CHIRALGATE_VERSION;

    py::enum_<Direction>(m, "Direction")
        .value("Right", Direction::Right)
        .value("Left", Direction::Left);

    py::class_<EmitterChain>(m, "EmitterChain")
        .def(py::init<>())
        .def_static("uniform", &EmitterChain::uniform, py::arg("n"),
                    py::arg("gamma_b") = 0.0, py::arg("gamma_s") = 0.0,
                    py::arg("k0d") = std::numbers::pi)
        .def_readwrite("n_emitters", &EmitterChain::n_emitters)
        .def_readwrite("gamma0", &EmitterChain::gamma0)
        .def_readwrite("gamma_b", &EmitterChain::gamma_b)
        .def_readwrite("gamma_s", &EmitterChain::gamma_s)
        .def_readwrite("k0d", &EmitterChain::k0d)
        .def_readwrite("detunings", &EmitterChain::detunings)
        .def_readwrite("rate_scales", &EmitterChain::rate_scales)
        .def_readwrite("positions", &EmitterChain::positions)
        .def("gamma_tot", &EmitterChain::gamma_tot)
        .def("beta", &EmitterChain::beta)
        .def("directionality", &EmitterChain::directionality)
        .def("is_perfectly_chiral", &EmitterChain::is_perfectly_chiral)
        .def("summary", &EmitterChain::summary)
        .def("__repr__", [](const EmitterChain& c) {
            return "<EmitterChain " + c.summary() + ">";
        });

    m.def(
        "validate_chain",
        [](const EmitterChain& c) { return validate_chain(c).problems; },
        "List of validation problems; empty when the chain is sound.");

    py::class_<FrequencyGrid>(m, "FrequencyGrid")
        .def(py::init([](double lo, double hi, int n) {
                 return FrequencyGrid{lo, hi, n};
             }),
             py::arg("min"), py::arg("max"), py::arg("n_points"))
        .def_static("centered", &FrequencyGrid::centered, py::arg("center"),
                    py::arg("half_span"), py::arg("n_points"))
        .def_readwrite("min", &FrequencyGrid::min)
        .def_readwrite("max", &FrequencyGrid::max)
        .def_readwrite("n_points", &FrequencyGrid::n_points)
        .def("step", &FrequencyGrid::step)
        .def("values", &FrequencyGrid::values)
        .def("trapezoid_weights", &FrequencyGrid::trapezoid_weights);

    py::class_<PulseSpec>(m, "PulseSpec")
        .def(py::init([](double center, double width, double delay, Direction dir) {
                 return PulseSpec{center, width, delay, dir};
             }),
             py::arg("center") = 0.0, py::arg("width") = 0.05, py::arg("delay") = 0.0,
             py::arg("direction") = Direction::Right)
        .def_readwrite("center", &PulseSpec::center)
        .def_readwrite("width", &PulseSpec::width)
        .def_readwrite("delay", &PulseSpec::delay)
        .def_readwrite("direction", &PulseSpec::direction)
        .def("envelope", &PulseSpec::envelope, py::arg("omega"))
        .def("sample", &PulseSpec::sample, py::arg("grid"))
        .def("summary", &PulseSpec::summary);

    py::class_<TwoPhotonState>(m, "TwoPhotonState")
        .def(py::init([](const FrequencyGrid& g1, const FrequencyGrid& g2,
                         const Eigen::MatrixXcd& a) {
                 return TwoPhotonState{g1, g2, a};
             }),
             py::arg("grid1"), py::arg("grid2"), py::arg("amplitudes"))
        .def_static("product", &TwoPhotonState::product, py::arg("right"),
                    py::arg("left"), py::arg("grid1"), py::arg("grid2"))
        .def_readwrite("grid1", &TwoPhotonState::grid1)
        .def_readwrite("grid2", &TwoPhotonState::grid2)
        .def_readwrite("amplitudes", &TwoPhotonState::amplitudes)
        .def("norm", &TwoPhotonState::norm);

    // Closed-form infinite-chain model.
    auto an = m.def_submodule("analytic", "infinite-chain closed forms");
    an.def("dispersion", &analytic::dispersion, py::arg("x"));
    an.def("inverse_dispersion", &analytic::inverse_dispersion, py::arg("omega"));
    an.def("group_velocity", &analytic::group_velocity, py::arg("x"));
    an.def("single_photon_phase", &analytic::single_photon_phase, py::arg("omega"),
           py::arg("n_emitters"));
    an.def("t_elastic", &analytic::t_elastic, py::arg("omega1"), py::arg("omega2"));
    an.def("t_inelastic", &analytic::t_inelastic, py::arg("omega1"), py::arg("omega2"));
    an.def("inelastic_energies", &analytic::inelastic_energies, py::arg("omega1"),
           py::arg("omega2"), py::arg("epsilon") = 1e-9);
    an.def("degenerate_momentum", &analytic::degenerate_momentum, py::arg("q"),
           py::arg("K"), py::arg("k0d"));
    an.def("amplitudes_kq", &analytic::amplitudes_kq, py::arg("q"), py::arg("K"),
           py::arg("k0d"));
    an.def("detuning_for_phase", &analytic::detuning_for_phase, py::arg("alpha"));
    an.def("scattering_amplitudes", [](double w1, double w2) {
        const auto a = analytic::scattering_amplitudes(w1, w2);
        py::dict d;
        d["t_el"] = a.t_el;
        d["t_in"] = a.t_in;
        d["omega1_out"] = a.omega1_out;
        d["omega2_out"] = a.omega2_out;
        d["velocity_ratio"] = a.velocity_ratio;
        return d;
    });

    // Exact finite-N scattering.
    py::enum_<exact::Sector>(m, "Sector")
        .value("Single", exact::Sector::Single)
        .value("Double", exact::Sector::Double);

    py::class_<exact::EffectiveHamiltonian>(m, "EffectiveHamiltonian")
        .def_readonly("sector", &exact::EffectiveHamiltonian::sector)
        .def_readonly("dimension", &exact::EffectiveHamiltonian::dimension)
        .def_readonly("matrix", &exact::EffectiveHamiltonian::matrix)
        .def_readonly("pair_basis", &exact::EffectiveHamiltonian::pair_basis);
    m.def("build_hamiltonian", &exact::build_hamiltonian, py::arg("chain"),
          py::arg("sector"));

    py::class_<exact::SinglePhotonS>(m, "SinglePhotonS")
        .def_readonly("direction", &exact::SinglePhotonS::direction)
        .def_readonly("grid", &exact::SinglePhotonS::grid)
        .def_readonly("transmission", &exact::SinglePhotonS::transmission)
        .def_readonly("reflection", &exact::SinglePhotonS::reflection);
    m.def("single_photon_s", &exact::single_photon_s, py::arg("chain"),
          py::arg("direction"), py::arg("grid"));

    py::class_<exact::ScatteringEngine>(m, "ScatteringEngine")
        .def(py::init<const EmitterChain&>(), py::arg("chain"))
        .def("single_dim", &exact::ScatteringEngine::single_dim)
        .def("double_dim", &exact::ScatteringEngine::double_dim)
        .def("transmission", &exact::ScatteringEngine::transmission, py::arg("omega"),
             py::arg("direction") = Direction::Right)
        .def("reflection", &exact::ScatteringEngine::reflection, py::arg("omega"),
             py::arg("direction") = Direction::Right)
        .def(
            "transmission_curve",
            [](const exact::ScatteringEngine& e, const Eigen::VectorXd& omegas,
               Direction d) {
                Eigen::VectorXcd t(omegas.size());
                for (Eigen::Index i = 0; i < omegas.size(); ++i)
                    t[i] = e.transmission(omegas[i], d);
                return t;
            },
            py::arg("omegas"), py::arg("direction") = Direction::Right)
        .def("two_photon_kernel", &exact::ScatteringEngine::two_photon_kernel,
             py::arg("omega1_in"), py::arg("omega2_in"), py::arg("omega1_out"))
        .def(
            "scatter_state",
            [](const exact::ScatteringEngine& e, const TwoPhotonState& psi) {
                exact::ScatterOutput out = e.scatter_state(psi);
                return py::make_tuple(out.state, out.grid_coarse_warning);
            },
            py::arg("psi_in"),
            "Returns (state, grid_coarse_warning).");

    py::class_<exact::OracleResult>(m, "OracleResult")
        .def_readonly("state", &exact::OracleResult::state)
        .def_readonly("t_right", &exact::OracleResult::t_right)
        .def_readonly("t_left", &exact::OracleResult::t_left);
    m.def(
        "time_domain_oracle",
        [](const EmitterChain& chain, const PulseSpec& right, const PulseSpec& left,
           const FrequencyGrid& grid, double t_start, double t_end, double dt,
           bool check_convergence, double convergence_tol) {
            exact::OracleOptions opt{t_start, t_end, dt, check_convergence,
                                     convergence_tol};
            return exact::time_domain_oracle(chain, right, left, grid, opt);
        },
        py::arg("chain"), py::arg("right"), py::arg("left"), py::arg("grid"),
        py::arg("t_start") = -60.0, py::arg("t_end") = 260.0, py::arg("dt") = 0.01,
        py::arg("check_convergence") = false, py::arg("convergence_tol") = 1e-5);

    // Gate metrics.
    py::class_<gate::FrequencyWindow>(m, "FrequencyWindow")
        .def(py::init([](double center, double half_width) {
                 return gate::FrequencyWindow{center, half_width};
             }),
             py::arg("center"), py::arg("half_width"))
        .def_readwrite("center", &gate::FrequencyWindow::center)
        .def_readwrite("half_width", &gate::FrequencyWindow::half_width)
        .def("contains", &gate::FrequencyWindow::contains, py::arg("omega"));

    py::class_<gate::ChoiSetup>(m, "ChoiSetup")
        .def(py::init<>())
        .def_readwrite("target_phase", &gate::ChoiSetup::target_phase)
        .def_readwrite("pulse_right", &gate::ChoiSetup::pulse_right)
        .def_readwrite("pulse_left", &gate::ChoiSetup::pulse_left)
        .def_readwrite("chain", &gate::ChoiSetup::chain)
        .def_readwrite("filter", &gate::ChoiSetup::filter)
        .def_readwrite("grid_points", &gate::ChoiSetup::grid_points)
        .def_readwrite("grid_span_sigmas", &gate::ChoiSetup::grid_span_sigmas);

    py::class_<GateMetadata>(m, "GateMetadata")
        .def_readonly("method", &GateMetadata::method)
        .def_readonly("chain_summary", &GateMetadata::chain_summary)
        .def_readonly("pulse_summary", &GateMetadata::pulse_summary)
        .def_readonly("pulses_mismatched", &GateMetadata::pulses_mismatched)
        .def_readonly("filter_contains_input", &GateMetadata::filter_contains_input)
        .def_readonly("width_at_boundary", &GateMetadata::width_at_boundary)
        .def_readonly("grid_coarse", &GateMetadata::grid_coarse);

    py::class_<GateResult>(m, "GateResult")
        .def_readonly("fidelity", &GateResult::fidelity)
        .def_readonly("success_probability", &GateResult::success_probability)
        .def_readonly("fidelity_unfiltered", &GateResult::fidelity_unfiltered)
        .def_readonly("target_phase", &GateResult::target_phase)
        .def_readonly("metadata", &GateResult::metadata)
        .def("__repr__", [](const GateResult& r) {
            return "<GateResult F=" + std::to_string(r.fidelity) +
                   " R=" + std::to_string(r.success_probability) + ">";
        });

    py::enum_<gate::Method>(m, "Method")
        .value("Analytic", gate::Method::Analytic)
        .value("Exact", gate::Method::Exact);

    py::class_<gate::WidthOptimum>(m, "WidthOptimum")
        .def_readonly("width", &gate::WidthOptimum::width)
        .def_readonly("result", &gate::WidthOptimum::result)
        .def_readonly("at_boundary", &gate::WidthOptimum::at_boundary);

    m.def("standard_setup", &gate::standard_setup, py::arg("n_emitters"),
          py::arg("width"), py::arg("target_phase") = std::numbers::pi,
          py::arg("filter_sigmas") = 6.0);
    m.def("with_width", &gate::with_width, py::arg("setup"), py::arg("width"));
    m.def("reference_phase", &gate::reference_phase, py::arg("omega1"),
          py::arg("omega2"), py::arg("chain"));
    m.def("fidelity_analytic", &gate::fidelity_analytic, py::arg("setup"));
    m.def("fidelity_exact", &gate::fidelity_exact, py::arg("setup"));
    m.def("optimize_width", &gate::optimize_width, py::arg("setup"),
          py::arg("width_min"), py::arg("width_max"),
          py::arg("method") = gate::Method::Exact);

    // Disorder Monte Carlo.
    py::class_<disorder::PositionJitter> jitter(m, "PositionJitter");
    py::enum_<disorder::PositionJitter::Kind>(jitter, "Kind")
        .value("Fixed", disorder::PositionJitter::Kind::None)
        .value("UniformSpacing", disorder::PositionJitter::Kind::UniformSpacing);
    jitter.def(py::init<>())
        .def_readwrite("kind", &disorder::PositionJitter::kind)
        .def_readwrite("min_spacing", &disorder::PositionJitter::min_spacing)
        .def_readwrite("max_spacing", &disorder::PositionJitter::max_spacing);

    py::class_<disorder::DisorderSpec>(m, "DisorderSpec")
        .def(py::init<>())
        .def_readwrite("sigma_gamma_db", &disorder::DisorderSpec::sigma_gamma_db)
        .def_readwrite("sigma_delta", &disorder::DisorderSpec::sigma_delta)
        .def_readwrite("position_jitter", &disorder::DisorderSpec::position_jitter)
        .def_readwrite("delay_mismatch", &disorder::DisorderSpec::delay_mismatch)
        .def_readwrite("n_realizations", &disorder::DisorderSpec::n_realizations)
        .def_readwrite("rng_seed", &disorder::DisorderSpec::rng_seed);

    m.def("sample_chain", &disorder::sample_chain, py::arg("base"), py::arg("spec"),
          py::arg("realization_index"));

    py::class_<disorder::RealizationRecord>(m, "RealizationRecord")
        .def_readonly("index", &disorder::RealizationRecord::index)
        .def_readonly("fidelity", &disorder::RealizationRecord::fidelity)
        .def_readonly("success_probability",
                      &disorder::RealizationRecord::success_probability);

    py::class_<disorder::DisorderSummary>(m, "DisorderSummary")
        .def_readonly("mean_fidelity", &disorder::DisorderSummary::mean_fidelity)
        .def_readonly("std_fidelity", &disorder::DisorderSummary::std_fidelity)
        .def_readonly("sem_fidelity", &disorder::DisorderSummary::sem_fidelity)
        .def_readonly("mean_success", &disorder::DisorderSummary::mean_success)
        .def_readonly("std_success", &disorder::DisorderSummary::std_success)
        .def_readonly("sem_success", &disorder::DisorderSummary::sem_success)
        .def_readonly("records", &disorder::DisorderSummary::records);

    m.def("monte_carlo_fidelity", &disorder::monte_carlo_fidelity, py::arg("base"),
          py::arg("spec"), py::arg("setup"));

    py::class_<disorder::DelayPoint>(m, "DelayPoint")
        .def_readonly("delay", &disorder::DelayPoint::delay)
        .def_readonly("fidelity", &disorder::DelayPoint::fidelity)
        .def_readonly("success_probability", &disorder::DelayPoint::success_probability);
    m.def("delay_sweep", &disorder::delay_sweep, py::arg("base"), py::arg("setup"),
          py::arg("delays"));

    py::class_<disorder::ChiralityPoint>(m, "ChiralityPoint")
        .def_readonly("n_emitters", &disorder::ChiralityPoint::n_emitters)
        .def_readonly("width", &disorder::ChiralityPoint::width)
        .def_readonly("fidelity", &disorder::ChiralityPoint::fidelity)
        .def_readonly("success_probability",
                      &disorder::ChiralityPoint::success_probability);
    py::class_<disorder::ChiralitySweepResult>(m, "ChiralitySweepResult")
        .def_readonly("points", &disorder::ChiralitySweepResult::points)
        .def_readonly("log_success_slope",
                      &disorder::ChiralitySweepResult::log_success_slope)
        .def_readonly("log_success_r2", &disorder::ChiralitySweepResult::log_success_r2)
        .def_readonly("fidelity_non_decreasing",
                      &disorder::ChiralitySweepResult::fidelity_non_decreasing);
    m.def("chirality_sweep", &disorder::chirality_sweep, py::arg("setup"),
          py::arg("n_min"), py::arg("n_max"), py::arg("gamma_b"), py::arg("gamma_s"));
}
