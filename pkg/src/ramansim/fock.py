"""Single-mode cavity field on a truncated Fock basis.

States are plain complex amplitude vectors indexed by photon number
``n = 0 .. n_max``.  Coherent-state amplitudes are built in the log domain so
that large cutoffs (n > 150) never touch an overflowing factorial.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, pdtrc

from .errors import DegenerateStateError, DimensionError, TruncationError

__all__ = [
    "FieldState",
    "Overlap",
    "default_cutoff",
    "make_coherent",
    "make_fock",
    "inner",
    "overlap_analytic",
    "apply_number_phase",
    "fidelity",
    "infidelity",
    "annihilation",
    "number_operator",
]

# Leakage above this raises; the default cutoff keeps it below 1e-12.
LEAKAGE_LIMIT = 1e-6
TAIL_TARGET = 1e-13


def _frozen(arr):
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FieldState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amplitudes)
        if amps.ndim != 1 or amps.size == 0:
            raise DimensionError(f"amplitudes must be a non-empty vector, got shape {amps.shape}")
        if not np.all(np.isfinite(amps)):
            raise DimensionError("amplitudes contain NaN or Inf")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_max(self) -> int:
        return self.amplitudes.size - 1

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def norm(self) -> float:
        return math.sqrt(self.norm_squared())

    def normalized(self) -> "FieldState":
        nrm = self.norm()
        if nrm == 0.0:
            raise DegenerateStateError("cannot normalize a zero-norm field state")
        return FieldState(self.amplitudes / nrm)

    def scaled(self, c: complex) -> "FieldState":
        return FieldState(c * self.amplitudes)

    def __add__(self, other: "FieldState") -> "FieldState":
        _check_dims(self, other)
        return FieldState(self.amplitudes + other.amplitudes)

    def __sub__(self, other: "FieldState") -> "FieldState":
        _check_dims(self, other)
        return FieldState(self.amplitudes - other.amplitudes)

    def mean_photon_number(self) -> float:
        n = np.arange(self.dim)
        return float(np.sum(n * np.abs(self.amplitudes) ** 2).real) / self.norm_squared()


@dataclass(frozen=True)
class Overlap:
    """Coherent-state overlap with a log-magnitude channel.

    ``value`` underflows to 0 for |alpha - beta|^2 beyond ~1400, while
    ``log_magnitude`` (natural log) stays exact.
    """

    value: complex
    log_magnitude: float

    @property
    def magnitude(self) -> float:
        return abs(self.value)

    @property
    def log10_magnitude(self) -> float:
        return self.log_magnitude / math.log(10.0)


def default_cutoff(alpha: complex) -> int:
    """ceil(|alpha|^2 + 10 max(|alpha|, 1)), raised until the Poisson tail
    above the cutoff is below 1e-13."""
    r = abs(alpha)
    n = int(math.ceil(r * r + 10.0 * max(r, 1.0)))
    while pdtrc(n, r * r) >= TAIL_TARGET:
        n += 1
    return n


def make_coherent(alpha: complex, n_max: int | None = None) -> FieldState:
    """Coherent state |alpha> truncated at ``n_max`` (inclusive).

    Raises TruncationError when the probability mass lost above the cutoff
    exceeds 1e-6.
    """
    if n_max is None:
        n_max = default_cutoff(alpha)
    if n_max < 0:
        raise DimensionError(f"n_max must be >= 0, got {n_max}")
    alpha = complex(alpha)
    amps = np.zeros(n_max + 1, dtype=complex)
    r = abs(alpha)
    if r == 0.0:
        amps[0] = 1.0
        return FieldState(amps)
    n = np.arange(n_max + 1)
    log_mag = -0.5 * r * r + n * math.log(r) - 0.5 * gammaln(n + 1)
    amps = np.exp(log_mag + 1j * n * cmath.phase(alpha))
    state = FieldState(amps)
    leakage = 1.0 - state.norm_squared()
    if leakage > LEAKAGE_LIMIT:
        raise TruncationError(
            f"cutoff n_max={n_max} too small for |alpha|={r:g}: leakage {leakage:.3e}",
            leakage=leakage,
        )
    return state


def make_fock(n: int, n_max: int) -> FieldState:
    if not 0 <= n <= n_max:
        raise DimensionError(f"Fock index {n} outside 0..{n_max}")
    amps = np.zeros(n_max + 1, dtype=complex)
    amps[n] = 1.0
    return FieldState(amps)


def _check_dims(f: FieldState, g: FieldState):
    if f.dim != g.dim:
        raise DimensionError(f"dimension mismatch: n_max {f.n_max} vs {g.n_max}")


def inner(f: FieldState, g: FieldState) -> complex:
    """<f|g>, conjugate-linear in ``f``."""
    _check_dims(f, g)
    return complex(np.vdot(f.amplitudes, g.amplitudes))


def overlap_analytic(alpha: complex, beta: complex) -> Overlap:
    """<alpha|beta> = exp(-|alpha|^2/2 - |beta|^2/2 + conj(alpha) beta)."""
    alpha, beta = complex(alpha), complex(beta)
    exponent = -0.5 * abs(alpha) ** 2 - 0.5 * abs(beta) ** 2 + alpha.conjugate() * beta
    return Overlap(value=cmath.exp(exponent), log_magnitude=exponent.real)


def apply_number_phase(f: FieldState, theta: float) -> FieldState:
    """exp(-i theta n) applied to ``f``; maps |alpha> to |exp(-i theta) alpha>."""
    if not math.isfinite(theta):
        raise ValueError("theta must be finite")
    n = np.arange(f.dim)
    return FieldState(f.amplitudes * np.exp(-1j * theta * n))


def fidelity(f: FieldState, g: FieldState) -> float:
    nf, ng = f.norm_squared(), g.norm_squared()
    if nf == 0.0 or ng == 0.0:
        raise DegenerateStateError("fidelity undefined for a zero-norm state")
    ov = inner(f, g)
    return min(1.0, (ov.real**2 + ov.imag**2) / (nf * ng))


def infidelity(f: FieldState, g: FieldState) -> float:
    """1 - fidelity, evaluated as the squared norm of the part of g orthogonal to f.

    Resolves infidelities far below machine epsilon, where ``1 - fidelity``
    would round to 0.
    """
    nf, ng = f.norm_squared(), g.norm_squared()
    if nf == 0.0 or ng == 0.0:
        raise DegenerateStateError("infidelity undefined for a zero-norm state")
    u = f.amplitudes / math.sqrt(nf)
    v = g.amplitudes / math.sqrt(ng)
    perp = v - np.vdot(u, v) * u
    return float(min(1.0, np.vdot(perp, perp).real))


def annihilation(n_max: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_max + 1)), k=1).astype(complex)


def number_operator(n_max: int) -> np.ndarray:
    return np.diag(np.arange(n_max + 1)).astype(complex)
