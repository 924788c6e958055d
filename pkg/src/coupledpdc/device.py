"""Physical devices as Bogoliubov transfer matrices.

Two constructions are provided:

* :class:`ContinuousDevice` -- a pair of downconverters whose idler modes
  exchange energy continuously over an interaction length, described by a
  quadratic generator and exponentiated into a transfer matrix.
* :class:`CascadedDevice` -- two downconverters in sequence with the first
  idler partially injected into the second converter through a mixer of
  angle ``psi`` (perfect alignment at ``psi = pi/2``).

Mode convention, used everywhere in this package: the operator vector is
``(A_s1, A_s2, A_i1^+, A_i2^+)`` -- annihilators for the two signal modes
followed by creators for the two idler modes.  In this mixed basis a
physical (commutator-preserving) transformation ``M`` satisfies
``M eta M^H = eta`` with ``eta = diag(+1, +1, -1, -1)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .config import TOL, Tolerances
from .linalg import as_complex_matrix, expm

__all__ = [
    "ETA",
    "ContinuousDevice",
    "CascadedDevice",
    "TransferMatrix",
    "Regime",
    "build_hamiltonian",
    "transfer_matrix",
    "cascaded_transfer_matrix",
    "classify_regime",
    "symplectic_residual",
]

#: Bogoliubov metric for the (A_s1, A_s2, A_i1^+, A_i2^+) operator vector.
ETA = np.diag([1.0, 1.0, -1.0, -1.0]).astype(complex)


def _require_finite(**values: float) -> None:
    for name, value in values.items():
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class ContinuousDevice:
    """Two downconverters with continuously coupled idlers.

    Parameters
    ----------
    gamma1, gamma2 : float
        Real downconversion strengths of the two crystals (inverse length).
    kappa : float
        Real strength of the linear idler-idler exchange (inverse length).
    length : float
        Interaction length, >= 0.

    Couplings are restricted to real values; the complex-coupling
    generalisation is deliberately not exposed.
    """

    gamma1: float
    gamma2: float
    kappa: float
    length: float

    def __post_init__(self) -> None:
        _require_finite(gamma1=self.gamma1, gamma2=self.gamma2,
                        kappa=self.kappa, length=self.length)
        if self.length < 0:
            raise ValueError(f"length must be >= 0, got {self.length}")


@dataclass(frozen=True)
class CascadedDevice:
    """Two downconverters in series with partially aligned idlers.

    ``r1`` and ``r2`` are the squeezing parameters of the two crystals and
    ``psi`` in [0, pi/2] is the mixing angle of the idler beamsplitter
    placed between them (``psi = pi/2``: the first idler is fully injected
    into the second crystal).
    """

    r1: float
    r2: float
    psi: float

    def __post_init__(self) -> None:
        _require_finite(r1=self.r1, r2=self.r2, psi=self.psi)
        if not 0.0 <= self.psi <= math.pi / 2:
            raise ValueError(f"psi must lie in [0, pi/2], got {self.psi}")


class Regime(enum.Enum):
    """Operating regime of a :class:`ContinuousDevice`.

    Weak idler coupling (|kappa| below the combined gain) lets the
    downconverted intensity grow exponentially; strong coupling keeps all
    intensities bounded and oscillatory.
    """

    ABOVE_THRESHOLD = "above-threshold"
    BELOW_THRESHOLD = "below-threshold"
    AT_THRESHOLD = "at-threshold"


def symplectic_residual(m: np.ndarray) -> float:
    """Largest element-wise violation of ``M eta M^H = eta``."""
    m = as_complex_matrix(m, square=True)
    return float(np.max(np.abs(m @ ETA @ m.conj().T - ETA)))


@dataclass(frozen=True)
class TransferMatrix:
    """A validated 4x4 Bogoliubov matrix in the mixed-operator basis.

    Construction enforces the commutator-preservation condition
    ``M eta M^H = eta``.  The check is scaled by ``max(1, max|M|^2)`` so
    that legitimately large above-threshold matrices, whose absolute
    floating-point residual grows with the entries, still construct; for
    the bounded below-threshold matrices the check is the plain
    element-wise tolerance.
    """

    matrix: np.ndarray
    tol: Tolerances = field(default=TOL, repr=False, compare=False)

    def __post_init__(self) -> None:
        m = as_complex_matrix(self.matrix, square=True)
        if m.shape != (4, 4):
            raise ValueError(f"transfer matrix must be 4x4, got {m.shape}")
        scale = max(1.0, float(np.max(np.abs(m))) ** 2)
        resid = symplectic_residual(m)
        if resid > self.tol.symplectic * scale:
            raise ValueError(
                f"matrix is not symplectic: residual {resid:.3e} "
                f"(allowed {self.tol.symplectic * scale:.3e})"
            )
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        return TransferMatrix(self.matrix @ other.matrix, tol=self.tol)

    @classmethod
    def identity(cls) -> "TransferMatrix":
        return cls(np.eye(4, dtype=complex))


def build_hamiltonian(dev: ContinuousDevice) -> np.ndarray:
    """Quadratic-form generator of the continuous device.

    Returns the real 4x4 matrix ``H`` such that the operator vector
    evolves as ``A_out = exp(iHL) A_in``.  Rows/columns follow the global
    (s1, s2, i1^+, i2^+) order.
    """
    h = np.zeros((4, 4), dtype=complex)
    h[0, 2] = dev.gamma1
    h[1, 3] = dev.gamma2
    h[2, 0] = -dev.gamma1
    h[2, 3] = -dev.kappa
    h[3, 1] = -dev.gamma2
    h[3, 2] = -dev.kappa
    return h


def transfer_matrix(dev: ContinuousDevice, tol: Tolerances = TOL) -> TransferMatrix:
    """Transfer matrix ``M = exp(i H L)`` of the continuous device."""
    h = build_hamiltonian(dev)
    return TransferMatrix(expm(1j * h * dev.length, tol), tol=tol)


def cascaded_transfer_matrix(dev: CascadedDevice, tol: Tolerances = TOL) -> TransferMatrix:
    """Transfer matrix of the cascaded device with partially aligned idlers.

    Rows are the input-output relations of the two-crystal cascade written
    in the mixed basis; the idler rows are the conjugated relations for
    the daggered operators.
    """
    ch1, sh1 = math.cosh(dev.r1), math.sinh(dev.r1)
    ch2, sh2 = math.cosh(dev.r2), math.sinh(dev.r2)
    c, s = math.cos(dev.psi), math.sin(dev.psi)
    m = np.zeros((4, 4), dtype=complex)
    # A_s1_out = A_s1 ch1 + i A_i1^+ sh1
    m[0, 0] = ch1
    m[0, 2] = 1j * sh1
    # A_s2_out = -i A_s1 sh1 s sh2 + A_s2 ch2 + A_i1^+ ch1 s sh2 + i A_i2^+ c sh2
    m[1, 0] = -1j * sh1 * s * sh2
    m[1, 1] = ch2
    m[1, 2] = ch1 * s * sh2
    m[1, 3] = 1j * c * sh2
    # A_i1_out = i A_s1^+ sh1 c + A_i1 ch1 c + i A_i2 s   (conjugated below)
    m[2, 0] = -1j * sh1 * c
    m[2, 2] = ch1 * c
    m[2, 3] = -1j * s
    # A_i2_out = -A_s1^+ sh1 s ch2 + i A_s2^+ sh2 + i A_i1 ch1 s ch2 + A_i2 c ch2
    m[3, 0] = -sh1 * s * ch2
    m[3, 1] = -1j * sh2
    m[3, 2] = -1j * ch1 * s * ch2
    m[3, 3] = c * ch2
    return TransferMatrix(m, tol=tol)


def classify_regime(dev: ContinuousDevice, tol: Tolerances = TOL) -> Regime:
    """Classify the device against the gain/coupling threshold.

    ``|kappa| < |gamma1| + |gamma2|`` is above threshold (exponential
    growth), the reverse is below threshold (bounded oscillations), and
    equality within ``tol.threshold_equality`` is reported as its own
    value rather than forced into either side.
    """
    gain = abs(dev.gamma1) + abs(dev.gamma2)
    if abs(abs(dev.kappa) - gain) <= tol.threshold_equality:
        return Regime.AT_THRESHOLD
    if abs(dev.kappa) < gain:
        return Regime.ABOVE_THRESHOLD
    return Regime.BELOW_THRESHOLD
