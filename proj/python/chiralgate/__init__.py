"""Two-photon phase gate on a chiral waveguide.

Thin Python surface over the C++ core: closed-form infinite-chain model,
exact finite-N scattering, gate fidelity metrics, and disorder Monte Carlo.
"""

from ._core import (  # noqa: F401
    ChiralityPoint,
    ChiralitySweepResult,
    ChoiSetup,
    DelayPoint,
    Direction,
    DisorderSpec,
    DisorderSummary,
    EffectiveHamiltonian,
    EmitterChain,
    FrequencyGrid,
    FrequencyWindow,
    GateMetadata,
    GateResult,
    Method,
    OracleResult,
    PositionJitter,
    PulseSpec,
    RealizationRecord,
    ScatteringEngine,
    Sector,
    SinglePhotonS,
    TwoPhotonState,
    WidthOptimum,
    __version__,
    analytic,
    build_hamiltonian,
    chirality_sweep,
    delay_sweep,
    fidelity_analytic,
    fidelity_exact,
    monte_carlo_fidelity,
    optimize_width,
    reference_phase,
    sample_chain,
    single_photon_s,
    standard_setup,
    time_domain_oracle,
    validate_chain,
    with_width,
)

__all__ = [
    "ChiralityPoint",
    "ChiralitySweepResult",
    "ChoiSetup",
    "DelayPoint",
    "Direction",
    "DisorderSpec",
    "DisorderSummary",
    "EffectiveHamiltonian",
    "EmitterChain",
    "FrequencyGrid",
    "FrequencyWindow",
    "GateMetadata",
    "GateResult",
    "Method",
    "OracleResult",
    "PositionJitter",
    "PulseSpec",
    "RealizationRecord",
    "ScatteringEngine",
    "Sector",
    "SinglePhotonS",
    "TwoPhotonState",
    "WidthOptimum",
    "__version__",
    "analytic",
    "build_hamiltonian",
    "chirality_sweep",
    "delay_sweep",
    "fidelity_analytic",
    "fidelity_exact",
    "monte_carlo_fidelity",
    "optimize_width",
    "reference_phase",
    "sample_chain",
    "single_photon_s",
    "standard_setup",
    "time_domain_oracle",
    "validate_chain",
    "with_width",
]
