"""Extraction of the two equivalent substituting schemes.

A below-threshold coupled-downconverter device can be replaced, for vacuum
input, by either of two short cascades of elementary components producing
the same output state:

* a **four-converter scheme** -- two direct downconverters (couplings
  ``g1``: s1-i1 and ``g2``: s2-i2) followed by two crossed ones
  (``g4``: s1-i2 and ``g5``: s2-i1);
* an **interferometer scheme** -- the two direct downconverters followed
  by a signal mixer of angle ``phi_s`` and an idler mixer of ``phi_i``.

Both parameter sets are recovered by back-propagating the vacuum-input
output moments through candidate inverse stages and demanding that the
correlations which a vacuum input cannot carry vanish at each step.  The
largest surviving such correlation is reported as the extraction
``residual``; zero residual certifies that the scheme reproduces the
device's output state exactly (the leftover back-propagated matrix is
passive, and passive stages act trivially on vacuum).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.optimize import minimize

from .config import TOL, Tolerances
from .device import TransferMatrix
from .errors import (
    ExtractionResidualError,
    NonRealCorrelationError,
    TanhDomainError,
)
from .moments import vacuum_moments

__all__ = [
    "FourConverterScheme",
    "InterferometerScheme",
    "ExtractionReport",
    "GainBound",
    "extract_four_converter",
    "extract_interferometer",
    "four_converter_matrix",
    "interferometer_matrix",
    "equivalence_residual",
    "gain_bound",
]


def _check_coupling(name: str, value: float, cap: float) -> None:
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    if abs(value) >= cap:
        raise ValueError(f"|{name}| = {abs(value)} is outside the sane "
                         f"inversion domain (cap {cap})")


@dataclass(frozen=True)
class FourConverterScheme:
    """Couplings of the four-downconverter substituting scheme."""

    g1: float
    g2: float
    g4: float
    g5: float

    def __post_init__(self) -> None:
        for name in ("g1", "g2", "g4", "g5"):
            _check_coupling(name, getattr(self, name), TOL.scheme_parameter_cap)


@dataclass(frozen=True)
class InterferometerScheme:
    """Parameters of the two-converter/two-mixer substituting scheme.

    Mixing angles are normalized to (-pi/2, pi/2].
    """

    g1: float
    g2: float
    phi_s: float
    phi_i: float

    def __post_init__(self) -> None:
        for name in ("g1", "g2"):
            _check_coupling(name, getattr(self, name), TOL.scheme_parameter_cap)
        half_pi = math.pi / 2
        for name in ("phi_s", "phi_i"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
            if not -half_pi < value <= half_pi + 1e-12:
                raise ValueError(f"{name} = {value} is not normalized "
                                 "into (-pi/2, pi/2]")


Scheme = Union[FourConverterScheme, InterferometerScheme]


@dataclass(frozen=True)
class ExtractionReport:
    """Result of a scheme extraction.

    ``residual`` is the largest back-propagated correlation that should
    vanish for vacuum input; ``branch`` records which root (or search
    path) produced the parameters; ``imag_residue`` is the largest
    imaginary contamination seen in the nominally real inversion
    arguments.
    """

    scheme: Scheme
    residual: float
    branch: str
    fallback_used: bool = False
    imag_residue: float = 0.0


@dataclass(frozen=True)
class GainBound:
    """Photon-number bound linking a device to its extracted scheme.

    ``signal_total`` is the device's mean output signal photon number and
    ``scheme_total`` the sum of ``sinh^2 g`` over the four converter
    couplings; physically ``signal_total >= scheme_total``, which caps
    every individual coupling at ``parameter_cap = asinh(sqrt(signal_total))``.
    """

    signal_total: float
    scheme_total: float
    parameter_cap: float
    violated: bool


# ---------------------------------------------------------------------------
# back-propagation stages (each is the inverse of the corresponding forward
# component; invert by negating the coupling or angle)

def crossed_stage(g4: float, g5: float) -> np.ndarray:
    """Undo the crossed converter pair (s1-i2 coupling g4, s2-i1 g5)."""
    c4, s4 = math.cosh(g4), math.sinh(g4)
    c5, s5 = math.cosh(g5), math.sinh(g5)
    return np.array(
        [
            [c4, 0, 0, -s4],
            [0, c5, -s5, 0],
            [0, -s5, c5, 0],
            [-s4, 0, 0, c4],
        ],
        dtype=complex,
    )


def direct_stage(g1: float, g2: float) -> np.ndarray:
    """Undo the direct converter pair (s1-i1 coupling g1, s2-i2 g2)."""
    c1, s1 = math.cosh(g1), math.sinh(g1)
    c2, s2 = math.cosh(g2), math.sinh(g2)
    return np.array(
        [
            [c1, 0, -1j * s1, 0],
            [0, c2, 0, -1j * s2],
            [1j * s1, 0, c1, 0],
            [0, 1j * s2, 0, c2],
        ],
        dtype=complex,
    )


def mixer_stage(phi_s: float, phi_i: float) -> np.ndarray:
    """Undo the signal and idler mixers of the interferometer scheme."""
    cs, ss = math.cos(phi_s), math.sin(phi_s)
    ci, si = math.cos(phi_i), math.sin(phi_i)
    return np.array(
        [
            [cs, -1j * ss, 0, 0],
            [-1j * ss, cs, 0, 0],
            [0, 0, ci, 1j * si],
            [0, 0, 1j * si, ci],
        ],
        dtype=complex,
    )


# ---------------------------------------------------------------------------
# shared helpers

def _moments_of(matrix: np.ndarray, tol: Tolerances):
    return vacuum_moments(TransferMatrix(matrix, tol=tol), tol)


def _vanishing_residual(matrix: np.ndarray, tol: Tolerances) -> float:
    """Largest vacuum moment of ``matrix``; zero iff it is passive."""
    return _moments_of(matrix, tol).max_abs()


def _invert_tanh(arg: complex, tol: Tolerances, *, what: str,
                 strict: bool = True) -> tuple[float, float]:
    """Solve ``tanh(2g) = arg`` for real g.

    Returns ``(g, imag_residue)``.  In strict mode a non-real argument or
    an argument reaching past +-1 by more than the rounding allowance is
    an error; the search path uses the lenient mode, where the residual
    is left to judge the candidate.
    """
    imag = abs(arg.imag)
    if strict and imag > tol.imag_correlation:
        raise NonRealCorrelationError(
            f"{what}: inversion argument has imaginary part {imag:.3e}"
        )
    x = float(arg.real)
    if abs(x) >= 1.0:
        overshoot = abs(x) - 1.0
        if strict and overshoot > tol.tanh_overshoot:
            raise TanhDomainError(
                f"{what}: |tanh argument| = {abs(x)} exceeds 1 beyond the "
                "rounding allowance"
            )
        x = math.copysign(1.0 - tol.tanh_clamp, x)
    return 0.5 * math.atanh(x), imag


def _direct_gains(matrix: np.ndarray, tol: Tolerances,
                  *, strict: bool = True) -> tuple[float, float, float]:
    """Couplings of the direct converter pair that decorrelate ``matrix``.

    Solves the two vanishing conditions for the s1-i1 and s2-i2 pair
    correlations; the inversion arguments are real exactly when those
    correlations are purely imaginary.
    """
    ms = _moments_of(matrix, tol)
    t1 = -2j * ms.d["s1i1"] / (ms.b["s1"] + ms.b["i1"] + 1.0)
    t2 = -2j * ms.d["s2i2"] / (ms.b["s2"] + ms.b["i2"] + 1.0)
    g1, r1 = _invert_tanh(t1, tol, what="direct gain g1", strict=strict)
    g2, r2 = _invert_tanh(t2, tol, what="direct gain g2", strict=strict)
    return g1, g2, max(r1, r2)


# ---------------------------------------------------------------------------
# four-converter extraction

def extract_four_converter(tm: TransferMatrix,
                           tol: Tolerances = TOL) -> ExtractionReport:
    """Extract the four-converter scheme from a transfer matrix.

    The crossed couplings follow from requiring the back-propagated
    s1-i2 and s2-i1 pair correlations to vanish, the direct couplings
    from the remaining s1-i1 and s2-i2 conditions; the residual is taken
    after the final back-propagation, where every vacuum moment must be
    zero.
    """
    m = tm.matrix
    ms = vacuum_moments(tm, tol)
    t4 = 2.0 * ms.d["s1i2"] / (ms.b["s1"] + ms.b["i2"] + 1.0)
    t5 = 2.0 * ms.d["s2i1"] / (ms.b["s2"] + ms.b["i1"] + 1.0)
    g4, imag4 = _invert_tanh(t4, tol, what="crossed gain g4")
    g5, imag5 = _invert_tanh(t5, tol, what="crossed gain g5")
    partial = crossed_stage(g4, g5) @ m
    g1, g2, imag12 = _direct_gains(partial, tol)
    residual = _vanishing_residual(direct_stage(g1, g2) @ partial, tol)
    if residual > tol.extraction_residual_max:
        raise ExtractionResidualError(
            f"four-converter residual {residual:.3e} exceeds "
            f"{tol.extraction_residual_max:.0e}"
        )
    return ExtractionReport(
        scheme=FourConverterScheme(g1=g1, g2=g2, g4=g4, g5=g5),
        residual=residual,
        branch="closed-form",
        imag_residue=max(imag4, imag5, imag12),
    )


# ---------------------------------------------------------------------------
# interferometer extraction

def _normalize_angle(phi: float) -> float:
    """Fold an angle into (-pi/2, pi/2] (mixers repeat modulo pi up to
    a sign relabeling that the gain extraction absorbs)."""
    folded = math.remainder(phi, math.pi)
    if folded <= -math.pi / 2:
        folded += math.pi
    return folded


def _interferometer_candidate(m: np.ndarray, phi_s: float, phi_i: float,
                              tol: Tolerances, *, strict: bool = False):
    """Evaluate one (phi_s, phi_i) candidate: gains, residual, residue."""
    partial = mixer_stage(phi_s, phi_i) @ m
    g1, g2, imag = _direct_gains(partial, tol, strict=strict)
    residual = _vanishing_residual(direct_stage(g1, g2) @ partial, tol)
    return g1, g2, residual, imag


def _closed_form_roots(ms, tol: Tolerances):
    """The two mixing-angle candidates of the closed-form solution.

    Returns a possibly empty list of ``(label, phi_s, phi_i)``.  Empty
    means a degenerate denominator or a contaminated argument, in which
    case the caller falls back to the bounded search.
    """
    d = ms.d
    num = 1j * (d["s1i1"] ** 2 + d["s1i2"] ** 2
                - d["s2i1"] ** 2 - d["s2i2"] ** 2)
    den = d["s1i1"] * d["s1i2"] - d["s2i1"] * d["s2i2"]
    if abs(den) < tol.degenerate_denominator:
        return []
    p = num / den
    if abs(p.imag) > tol.imag_correlation * max(1.0, abs(p.real)):
        return []
    roots = []
    for label, sign in (("+", 1.0), ("-", -1.0)):
        tan_i = 0.5 * (-p.real + sign * math.sqrt(p.real ** 2 + 4.0))
        den_s = d["s2i1"] * tan_i + 1j * d["s2i2"]
        if abs(den_s) < tol.degenerate_denominator:
            continue
        tan_s = (d["s1i2"] - 1j * d["s1i1"] * tan_i) / den_s
        if abs(tan_s.imag) > tol.imag_correlation * max(1.0, abs(tan_s.real)):
            continue
        roots.append((label, math.atan(tan_s.real), math.atan(tan_i)))
    return roots


def _search_candidates(m: np.ndarray, tol: Tolerances):
    """Bounded 2-D residual-minimizing search over the mixing angles.

    Deterministic: a fixed angle grid seeds a Nelder-Mead refinement of
    the few best, well-separated seeds.  Multiple exact solutions exist
    whenever the device has a relabeling symmetry; all near-optimal
    candidates are returned so the caller can canonicalize.
    """
    angles = np.linspace(-math.pi / 2, math.pi / 2, 37)
    seeds = []
    for ps in angles:
        for pi in angles:
            _, _, residual, _ = _interferometer_candidate(m, ps, pi, tol)
            seeds.append((residual, float(ps), float(pi)))
    seeds.sort(key=lambda s: (s[0], abs(s[1]) + abs(s[2]), s[1], s[2]))
    picked = []
    for residual, ps, pi in seeds:
        if any(abs(ps - qs) + abs(pi - qi) < 0.3 for _, qs, qi in picked):
            continue
        picked.append((residual, ps, pi))
        if len(picked) == 6:
            break
    candidates = []
    for residual, ps, pi in picked:
        if residual > tol.fallback_residual:
            def cost(x):
                _, _, r, _ = _interferometer_candidate(m, x[0], x[1], tol)
                return r
            opt = minimize(cost, [ps, pi], method="Nelder-Mead",
                           options={"xatol": 1e-13, "fatol": 1e-16,
                                    "maxiter": 400})
            ps, pi = float(opt.x[0]), float(opt.x[1])
        ps, pi = _normalize_angle(ps), _normalize_angle(pi)
        g1, g2, residual, imag = _interferometer_candidate(m, ps, pi, tol)
        candidates.append((residual, ps, pi, g1, g2, imag))
    return candidates


def extract_interferometer(tm: TransferMatrix,
                           tol: Tolerances = TOL) -> ExtractionReport:
    """Extract the interferometer scheme from a transfer matrix.

    The mixing angles come from a closed-form solution of the vanishing
    conditions for the crossed pair correlations; both roots of the
    underlying quadratic are evaluated and the one with the smaller final
    residual wins.  Degenerate devices (vanishing denominators, e.g. a
    symmetric device or a fully aligned cascade) fall back to a bounded
    deterministic 2-D search; among equivalent zero-residual solutions
    the canonical representative keeps the second converter's gain
    smallest, then the mixing angles smallest.

    Raises :class:`~coupledpdc.errors.ExtractionResidualError` when not
    even the fallback reaches the residual tolerance.
    """
    m = tm.matrix
    ms = vacuum_moments(tm, tol)
    branch = None
    fallback = False

    best = None
    for label, phi_s, phi_i in _closed_form_roots(ms, tol):
        try:
            g1, g2, residual, imag = _interferometer_candidate(
                m, phi_s, phi_i, tol, strict=True)
        except (NonRealCorrelationError, TanhDomainError):
            continue
        if best is None or residual < best[0]:
            best = (residual, phi_s, phi_i, g1, g2, imag)
            branch = label

    if best is None or best[0] > tol.extraction_residual_max:
        fallback = True
        scale = max(1.0, ms.max_abs())
        if max(abs(ms.d["s1i2"]), abs(ms.d["s2i1"])) \
                <= tol.degenerate_denominator * scale:
            # the crossed correlations already vanish: the identity mixer
            # is the canonical representative
            g1, g2, residual, imag = _interferometer_candidate(
                m, 0.0, 0.0, tol)
            best = (residual, 0.0, 0.0, g1, g2, imag)
            branch = "mixer-free"
        else:
            candidates = _search_candidates(m, tol)
            rmin = min(c[0] for c in candidates)
            admissible = [c for c in candidates
                          if c[0] <= max(tol.fallback_residual, 2.0 * rmin)]
            admissible.sort(key=lambda c: (round(abs(c[4]), 9),
                                           round(abs(c[1]) + abs(c[2]), 9),
                                           c[1], c[2]))
            best = admissible[0]
            branch = "search"

    residual, phi_s, phi_i, g1, g2, imag = best
    if residual > tol.extraction_residual_max:
        raise ExtractionResidualError(
            f"interferometer residual {residual:.3e} exceeds "
            f"{tol.extraction_residual_max:.0e}"
        )
    return ExtractionReport(
        scheme=InterferometerScheme(g1=g1, g2=g2,
                                    phi_s=phi_s, phi_i=phi_i),
        residual=residual,
        branch=branch,
        fallback_used=fallback,
        imag_residue=imag,
    )


# ---------------------------------------------------------------------------
# forward synthesis and scheme diagnostics

def four_converter_matrix(scheme: FourConverterScheme,
                          tol: Tolerances = TOL) -> TransferMatrix:
    """Forward transfer matrix of the four-converter scheme.

    Equals the original device's matrix only up to a passive stage, but
    produces the same vacuum output moments.
    """
    forward = crossed_stage(-scheme.g4, -scheme.g5) \
        @ direct_stage(-scheme.g1, -scheme.g2)
    return TransferMatrix(forward, tol=tol)


def interferometer_matrix(scheme: InterferometerScheme,
                          tol: Tolerances = TOL) -> TransferMatrix:
    """Forward transfer matrix of the interferometer scheme."""
    forward = mixer_stage(-scheme.phi_s, -scheme.phi_i) \
        @ direct_stage(-scheme.g1, -scheme.g2)
    return TransferMatrix(forward, tol=tol)


def equivalence_residual(tm: TransferMatrix, scheme: Scheme,
                         tol: Tolerances = TOL) -> float:
    """Largest vacuum moment left after undoing ``scheme`` behind ``tm``.

    Zero (to rounding) certifies that the scheme generates the same
    vacuum output state as the device.
    """
    m = tm.matrix
    if isinstance(scheme, FourConverterScheme):
        undone = direct_stage(scheme.g1, scheme.g2) \
            @ crossed_stage(scheme.g4, scheme.g5) @ m
    elif isinstance(scheme, InterferometerScheme):
        undone = direct_stage(scheme.g1, scheme.g2) \
            @ mixer_stage(scheme.phi_s, scheme.phi_i) @ m
    else:
        raise TypeError(f"unsupported scheme type {type(scheme).__name__}")
    return _vanishing_residual(undone, tol)


def gain_bound(tm: TransferMatrix, scheme: FourConverterScheme,
               tol: Tolerances = TOL) -> GainBound:
    """Photon-number inequality between a device and its scheme.

    The device's total signal output must be at least the sum of
    ``sinh^2 g`` over the scheme couplings, which in turn caps each
    individual coupling.
    """
    ms = vacuum_moments(tm, tol)
    lhs = ms.b["s1"] + ms.b["s2"]
    rhs = (math.sinh(scheme.g1) ** 2 + math.sinh(scheme.g2) ** 2
           + math.sinh(scheme.g4) ** 2 + math.sinh(scheme.g5) ** 2)
    return GainBound(
        signal_total=lhs,
        scheme_total=rhs,
        parameter_cap=math.asinh(math.sqrt(max(lhs, 0.0))),
        violated=lhs < rhs - tol.gain_bound_slack,
    )
