"""Degenerate Raman dynamics of a Lambda atom coupled to one cavity mode.

Units: frequencies and couplings in kHz (angular), times in ms, so that
``frequency * time`` is a phase in radians.

Atom levels are indexed g=0, e=1, f=2.  Joint amplitudes have shape
``(atom_levels, n_max + 1)``; flattening is level-major, matching
``np.kron(atom_operator, field_operator)``.

Sign convention: beta = -lambda**2 / delta is negative for delta > 0.  The
transfer time is taken as ``pi / (2 |beta|)``, for which exp(-2 i beta t) = -1
whatever the sign of beta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import fock
from .errors import AccuracyError, DimensionError, ValidationError

__all__ = [
    "G",
    "E",
    "F",
    "RamanParams",
    "Operator",
    "JointState",
    "ModelDeviationReport",
    "effective_hamiltonian",
    "full_hamiltonian",
    "excitation_operator",
    "evolve_closed_form",
    "evolve_numeric",
    "compare_models",
    "check_qubit",
    "transfer_time",
]

G, E, F = 0, 1, 2
LEVELS = {"g": G, "e": E, "f": F}

RESONANCE_TOL = 1e-9
QUBIT_NORM_TOL = 1e-9
HERMITIAN_TOL = 1e-12
NORM_TOL = 1e-9


@dataclass(frozen=True)
class RamanParams:
    """Physical parameters of the Raman interaction.

    omega0, omega_f and omega are optional; when all three are given they
    must satisfy omega_f - omega0 = delta + omega.  They never enter the
    rotating-frame dynamics.
    """

    lambda_coupling: float
    delta: float
    alpha: complex
    omega0: float | None = None
    omega_f: float | None = None
    omega: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        for name in ("lambda_coupling", "delta"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValidationError(f"{name} must be finite, got {v}")
        if not (math.isfinite(self.alpha.real) and math.isfinite(self.alpha.imag)):
            raise ValidationError("alpha must be finite")
        if self.delta == 0:
            raise ValidationError("detuning delta must be non-zero")
        if not math.isfinite(self.beta):
            raise ValidationError("effective coupling beta is not finite")
        freqs = (self.omega0, self.omega_f, self.omega)
        if all(v is not None for v in freqs):
            mismatch = (self.omega_f - self.omega0) - (self.delta + self.omega)
            if abs(mismatch) > RESONANCE_TOL:
                raise ValidationError(
                    f"resonance relation omega_f - omega0 = delta + omega violated by {mismatch:.3e} kHz"
                )

    @property
    def beta(self) -> float:
        return -self.lambda_coupling**2 / self.delta

    def replace(self, **changes) -> "RamanParams":
        data = dict(
            lambda_coupling=self.lambda_coupling,
            delta=self.delta,
            alpha=self.alpha,
            omega0=self.omega0,
            omega_f=self.omega_f,
            omega=self.omega,
        )
        data.update(changes)
        return RamanParams(**data)


def transfer_time(p: RamanParams) -> float:
    """Interaction time pi / (2 |beta|) mapping |alpha> to |-alpha>."""
    if p.beta == 0:
        raise ValidationError("beta = 0 (no coupling): transfer time is infinite")
    return math.pi / (2.0 * abs(p.beta))


@dataclass(frozen=True, eq=False)
class Operator:
    atom_levels: int
    n_max: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        d = self.atom_levels * (self.n_max + 1)
        if m.shape != (d, d):
            raise DimensionError(f"operator shape {m.shape} does not match dim {d}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0))

    def block(self, levels: tuple[int, ...], n: tuple[int, ...]) -> np.ndarray:
        """Sub-matrix on the basis states (levels[k], n[k])."""
        idx = [lv * (self.n_max + 1) + m for lv, m in zip(levels, n)]
        return self.matrix[np.ix_(idx, idx)]


@dataclass(frozen=True, eq=False)
class JointState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 2 or amps.shape[0] not in (2, 3):
            raise DimensionError(f"joint amplitudes must have shape (2|3, n_max+1), got {amps.shape}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def product(cls, atom: tuple[complex, ...], f: fock.FieldState) -> "JointState":
        return cls(np.outer(np.asarray(atom, dtype=complex), f.amplitudes))

    @property
    def atom_levels(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def n_max(self) -> int:
        return self.amplitudes.shape[1] - 1

    def flat(self) -> np.ndarray:
        return self.amplitudes.reshape(-1)

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def row(self, level: int) -> fock.FieldState:
        return fock.FieldState(self.amplitudes[level])

    def population(self, level: int) -> float:
        r = self.amplitudes[level]
        return float(np.vdot(r, r).real)

    def embed3(self) -> "JointState":
        if self.atom_levels == 3:
            return self
        return JointState(np.vstack([self.amplitudes, np.zeros(self.n_max + 1)]))


def check_qubit(c_g: complex, c_e: complex):
    norm = abs(c_g) ** 2 + abs(c_e) ** 2
    if abs(norm - 1.0) > QUBIT_NORM_TOL:
        raise ValidationError(f"atomic qubit not normalized: |c_g|^2 + |c_e|^2 = {norm:.12g}")


def _atom_projector(levels: int, i: int, j: int) -> np.ndarray:
    m = np.zeros((levels, levels), dtype=complex)
    m[i, j] = 1.0
    return m


def effective_hamiltonian(p: RamanParams, n_max: int) -> Operator:
    """beta n (|g><g| + |e><e|) + beta n (|e><g| + |g><e|) on the 2-level atom.

    Each photon-number block is beta*n*[[1, 1], [1, 1]], eigenvalues {0, 2 n beta}.
    """
    atom = np.ones((2, 2), dtype=complex)
    return Operator(2, n_max, p.beta * np.kron(atom, fock.number_operator(n_max)))


def full_hamiltonian(p: RamanParams, n_max: int) -> Operator:
    """Rotating-frame Lambda model before adiabatic elimination.

    H = delta |f><f| + lambda [a (|f><g| + |f><e|) + h.c.]

    This microscopic model is our reconstruction; eliminating |f> to second
    order in lambda/delta gives back ``effective_hamiltonian`` including the
    Stark terms.
    """
    a = fock.annihilation(n_max)
    ident = np.eye(n_max + 1, dtype=complex)
    raise_to_f = _atom_projector(3, F, G) + _atom_projector(3, F, E)
    coupling = np.kron(raise_to_f, a)
    h = p.delta * np.kron(_atom_projector(3, F, F), ident)
    h = h + p.lambda_coupling * (coupling + coupling.conj().T)
    return Operator(3, n_max, h)


def excitation_operator(n_max: int) -> np.ndarray:
    """Photon number plus |f> population; commutes with ``full_hamiltonian``."""
    return np.kron(np.eye(3), fock.number_operator(n_max)) + np.kron(
        _atom_projector(3, F, F), np.eye(n_max + 1)
    )


def evolve_closed_form(
    c_g: complex, c_e: complex, p: RamanParams, t: float, n_max: int | None = None
) -> JointState:
    """(c+ |a'> - c- |a>)|g> + (c+ |a'> + c- |a>)|e>, a' = exp(-2 i beta t) a.

    c+- = (c_e +- c_g) / 2.
    """
    check_qubit(c_g, c_e)
    if n_max is None:
        n_max = fock.default_cutoff(p.alpha)
    c_plus = 0.5 * (c_e + c_g)
    c_minus = 0.5 * (c_e - c_g)
    rotated = fock.make_coherent(np.exp(-2j * p.beta * t) * p.alpha, n_max).amplitudes
    initial = fock.make_coherent(p.alpha, n_max).amplitudes
    amps = np.vstack([c_plus * rotated - c_minus * initial, c_plus * rotated + c_minus * initial])
    return JointState(amps)


def _propagate(vals, vecs, psi0, dt, steps):
    step = (vecs * np.exp(-1j * vals * dt)) @ vecs.conj().T
    psi = psi0
    for _ in range(steps):
        psi = step @ psi
    return psi


def evolve_numeric(
    h: Operator,
    psi0: JointState,
    t: float,
    steps: int = 1,
    tol: float = 1e-9,
    max_refinements: int = 6,
) -> JointState:
    """Propagate ``psi0`` under ``h`` for time ``t`` by repeated unitary steps.

    Each step applies exp(-i h dt) built from a Hermitian eigendecomposition.
    The result is accepted once halving dt changes the final state by less
    than ``tol`` in norm; otherwise steps are doubled up to
    ``max_refinements`` times before AccuracyError is raised.
    """
    if steps < 1:
        raise ValidationError("steps must be >= 1")
    if psi0.atom_levels != h.atom_levels or psi0.n_max != h.n_max:
        raise DimensionError(
            f"state ({psi0.atom_levels}x{psi0.n_max + 1}) does not match operator "
            f"({h.atom_levels}x{h.n_max + 1})"
        )
    scale = max(1.0, float(np.max(np.abs(h.matrix), initial=0.0)))
    if h.hermiticity_defect() > HERMITIAN_TOL * scale:
        raise ValidationError(f"operator is not Hermitian (defect {h.hermiticity_defect():.3e})")
    if t == 0:
        return psi0

    vals, vecs = np.linalg.eigh(h.matrix)
    flat0 = psi0.flat()
    coarse = _propagate(vals, vecs, flat0, t / steps, steps)
    for _ in range(max_refinements):
        steps *= 2
        fine = _propagate(vals, vecs, flat0, t / steps, steps)
        if np.linalg.norm(fine - coarse) < tol:
            break
        coarse = fine
    else:
        raise AccuracyError(
            f"time stepping did not converge to {tol:g} after {max_refinements} refinements"
        )
    out = JointState(fine.reshape(psi0.amplitudes.shape))
    drift = abs(out.norm_squared() - psi0.norm_squared())
    if drift > NORM_TOL:
        raise AccuracyError(f"norm drift {drift:.3e} exceeds {NORM_TOL:g}")
    return out


@dataclass(frozen=True)
class ModelDeviationReport:
    t: float
    infidelity: float
    f_leakage: float
    margin1: float
    margin2: float
    n_max: int = field(default=0)


def validity_margins(p: RamanParams, t: float) -> tuple[float, float]:
    """Ratios of the two regime inequalities: delta^2 / (2 |2 lambda alpha|^2) and
    [3 delta^3 / (4 |lambda alpha|^4)] / t.  Infinite when lambda*alpha = 0."""
    if not t > 0:
        raise ValidationError(f"interaction time must be > 0, got {t}")
    la = abs(p.lambda_coupling * p.alpha)
    if la == 0:
        return math.inf, math.inf
    margin1 = p.delta**2 / (2.0 * (2.0 * la) ** 2)
    margin2 = (3.0 * abs(p.delta) ** 3 / (4.0 * la**4)) / t
    return margin1, margin2


def compare_models(
    p: RamanParams, c_g: complex, c_e: complex, t: float, n_max: int | None = None
) -> ModelDeviationReport:
    """Evolve the qubit-times-|alpha> state under both Hamiltonians.

    The effective result is embedded in the 3-level space with zero |f>
    amplitude.  ``infidelity`` is 1 - |<eff|full>|^2 (the overlap only sees the
    g/e rows); population left in |f> is reported as ``f_leakage``.
    """
    check_qubit(c_g, c_e)
    margin1, margin2 = validity_margins(p, t)
    if n_max is None:
        n_max = fock.default_cutoff(p.alpha)
    coh = fock.make_coherent(p.alpha, n_max)
    psi0 = JointState.product((c_g, c_e), coh)
    eff = evolve_numeric(effective_hamiltonian(p, n_max), psi0, t)
    full = evolve_numeric(full_hamiltonian(p, n_max), psi0.embed3(), t)
    ov = np.vdot(eff.amplitudes, full.amplitudes[:2])
    inf = float(min(1.0, max(0.0, 1.0 - abs(ov) ** 2)))
    return ModelDeviationReport(
        t=t,
        infidelity=inf,
        f_leakage=full.population(F),
        margin1=margin1,
        margin2=margin2,
        n_max=n_max,
    )
