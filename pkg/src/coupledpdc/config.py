"""Central numerical tolerances.

Every module reads its thresholds from a single :class:`Tolerances` record
so the library, the CLI and the test suites agree on what "zero" means.
The defaults are the contract; construct a custom record only to loosen or
tighten a specific check in exploratory work.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # dense linear algebra
    expm_dim_cap: int = 4096          # largest matrix expm will accept
    condition_cap: float = 1e12       # inverse() refuses beyond this estimate
    inverse_identity: float = 1e-10   # |inv(a)@a - I| element-wise, 4x4

    # transfer matrices
    symplectic: float = 1e-10         # |M eta M^H - eta| element-wise
    semigroup: float = 1e-9           # composition consistency of exp(iHL)
    threshold_equality: float = 1e-12 # |kappa| == gamma1+gamma2 detection

    # vacuum moments and coherence
    occupation_floor: float = -1e-12  # occupations this far below 0 clamp to 0
    pair_conservation: float = 1e-9   # signal total == idler total
    coherence_epsilon: float = 1e-14  # occupations below this: undefined gamma
    coherence_fragile: float = 1e-8   # occupations below this: fragile gamma
    coherence_imag: float = 1e-9      # |Im| allowance for real-coupling gamma
    coherence_bound_slack: float = 1e-9  # |gamma| <= 1 + slack

    # scheme extraction
    imag_correlation: float = 1e-9    # purely-imaginary correlation assertion
    tanh_overshoot: float = 1e-9      # |arg|-1 beyond this is an error
    tanh_clamp: float = 1e-15         # clamped into (-1+clamp, 1-clamp)
    degenerate_denominator: float = 1e-12  # closed form gives way to search
    fallback_residual: float = 1e-10  # residual target of the 2-D search
    extraction_residual_max: float = 1e-6  # hard failure beyond this
    scheme_moment_match: float = 1e-8 # forward-synthesis moment agreement
    coherence_match: float = 1e-6     # mixer-formula gamma vs direct gamma
    gain_bound_slack: float = 1e-9    # photon-number inequality slack
    scheme_parameter_cap: float = 10.0  # |g| sanity bound after inversion

    # which-way analysis
    probability_sum: float = 1e-12    # p1 + p2 == 1
    lagrange_identity: float = 1e-12  # dot^2 + cross^2 == u^2 v^2

    # truncated number-basis oracle
    fock_norm: float = 1e-9           # evolved-state norm drift allowance
    fock_leakage_max: float = 1e-4    # boundary population beyond this fails


TOL = Tolerances()
