"""Cat-qubit algebra on the ordered, non-orthogonal basis (|-alpha>, |alpha>).

Index 0 is always |-alpha>, index 1 is |alpha>.  The two basis states overlap
by s = <-alpha|alpha> = exp(-2|alpha|^2), which is real and positive for every
complex alpha, so the Gram matrix is [[1, s], [s, 1]].

Two Hadamards live here: ``hadamard_ideal`` treats the basis as orthonormal
and applies (1/sqrt2)[[1, 1], [1, -1]] to the coefficients, while
``hadamard_literal`` applies the unnormalized outer-product operator

    |-a><-a| - |a><a| + |a><-a| + |-a><a|

to a Fock vector with exact bras.  On coefficients the literal operator acts
as [[1, 1], [1, -1]] @ Gram, i.e. the ideal matrix times sqrt2 up to O(s).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fock
from .errors import IllConditionedBasisError

__all__ = [
    "CatQubit",
    "HADAMARD",
    "gram_matrix",
    "literal_matrix",
    "bloch_grid",
    "hadamard_ideal",
    "hadamard_literal",
    "embed",
    "decompose",
    "gate_error",
]

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)
_H_UNSCALED = np.array([[1.0, 1.0], [1.0, -1.0]])

# cond(Gram) = (1+s)/(1-s) crosses 100 at |alpha| = 0.1.
DEFAULT_MAX_CONDITION = 100.0


def basis_overlap(alpha: complex) -> float:
    return fock.overlap_analytic(-alpha, alpha).value.real


def gram_matrix(alpha: complex) -> np.ndarray:
    s = basis_overlap(alpha)
    return np.array([[1.0, s], [s, 1.0]])


def literal_matrix(alpha: complex) -> np.ndarray:
    """Exact coefficient-space action of ``hadamard_literal``."""
    return _H_UNSCALED @ gram_matrix(alpha)


@dataclass(frozen=True)
class CatQubit:
    alpha: complex
    a: complex
    b: complex

    def __post_init__(self):
        for name in ("alpha", "a", "b"):
            object.__setattr__(self, name, complex(getattr(self, name)))

    @property
    def s(self) -> float:
        return basis_overlap(self.alpha)

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([self.a, self.b])

    def gram_norm_squared(self) -> float:
        a, b = self.a, self.b
        return abs(a) ** 2 + abs(b) ** 2 + 2.0 * self.s * (a.conjugate() * b).real

    def normalized(self) -> "CatQubit":
        n = math.sqrt(self.gram_norm_squared())
        return CatQubit(self.alpha, self.a / n, self.b / n)

    def with_coefficients(self, coeffs) -> "CatQubit":
        return CatQubit(self.alpha, coeffs[0], coeffs[1])


def bloch_grid(n_rings: int = 3, n_azimuth: int = 5) -> list[tuple[complex, complex]]:
    """Deterministic qubits (cos(th/2), e^{i phi} sin(th/2)) covering the sphere.

    Default: both poles plus 3 latitude rings of 5 azimuths = 17 points.
    """
    pts = [(1.0 + 0j, 0j)]
    for i in range(1, n_rings + 1):
        theta = math.pi * i / (n_rings + 1)
        for k in range(n_azimuth):
            phi = 2.0 * math.pi * k / n_azimuth
            pts.append((complex(math.cos(theta / 2)), np.exp(1j * phi) * math.sin(theta / 2)))
    pts.append((0j, 1.0 + 0j))
    return pts


def hadamard_ideal(q: CatQubit) -> CatQubit:
    return q.with_coefficients(HADAMARD @ q.coefficients)


def hadamard_literal(f: fock.FieldState, alpha: complex) -> fock.FieldState:
    """|-a>(<-a|f> + <a|f>) + |a>(<-a|f> - <a|f>); not normalized."""
    minus = fock.make_coherent(-alpha, f.n_max)
    plus = fock.make_coherent(alpha, f.n_max)
    pm = fock.inner(minus, f)
    pp = fock.inner(plus, f)
    return minus.scaled(pm + pp) + plus.scaled(pm - pp)


def embed(q: CatQubit, n_max: int | None = None) -> fock.FieldState:
    """a|-alpha> + b|alpha> as a Fock vector."""
    if n_max is None:
        n_max = fock.default_cutoff(q.alpha)
    return fock.make_coherent(-q.alpha, n_max).scaled(q.a) + fock.make_coherent(q.alpha, n_max).scaled(q.b)


def decompose(
    f: fock.FieldState, alpha: complex, max_condition: float = DEFAULT_MAX_CONDITION
) -> tuple[CatQubit, float]:
    """Project ``f`` onto span{|-alpha>, |alpha>} by solving the Gram system.

    Returns the coefficients and the norm of the out-of-span remainder.
    """
    gram = gram_matrix(alpha)
    s = gram[0, 1]
    cond = math.inf if s >= 1.0 else (1.0 + s) / (1.0 - s)
    if cond > max_condition:
        raise IllConditionedBasisError(
            f"basis {{|-alpha>, |alpha>}} ill-conditioned at |alpha|={abs(alpha):g} "
            f"(condition number {cond:.4g} > {max_condition:g})",
            condition_number=cond,
        )
    minus = fock.make_coherent(-alpha, f.n_max)
    plus = fock.make_coherent(alpha, f.n_max)
    rhs = np.array([fock.inner(minus, f), fock.inner(plus, f)])
    a, b = np.linalg.solve(gram, rhs)
    q = CatQubit(alpha, a, b)
    residual = (f - embed(q, f.n_max)).norm()
    return q, residual


def gate_error(alpha: complex, grid=None, n_max: int | None = None) -> float:
    """Worst-case infidelity between the literal and ideal Hadamard over a qubit grid.

    For each grid qubit the Gram-normalized cat state is pushed through
    ``hadamard_literal`` (then normalized) and compared with the embedding of
    ``hadamard_ideal`` applied to its decomposed coefficients.
    """
    if grid is None:
        grid = bloch_grid()
    if n_max is None:
        n_max = fock.default_cutoff(alpha)
    worst = 0.0
    for a, b in grid:
        state = embed(CatQubit(alpha, a, b).normalized(), n_max)
        q, _ = decompose(state, alpha)
        literal = hadamard_literal(state, alpha)
        ideal = embed(hadamard_ideal(q), n_max)
        worst = max(worst, fock.infidelity(literal, ideal))
    return worst
