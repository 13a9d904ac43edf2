"""Projective detection of the atom and the cat states it leaves in the cavity."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fock
from .dynamics import E, F, LEVELS, JointState, check_qubit
from .errors import ImpossibleOutcomeError, InvalidSubspaceError, ValidationError

__all__ = [
    "DetectionOutcome",
    "project_atom",
    "outcome_probabilities",
    "post_measurement_cat",
    "cat_branch_probability",
    "sample_outcome",
]

F_POPULATION_LIMIT = 1e-6
MIN_PROBABILITY = 1e-15


@dataclass(frozen=True)
class DetectionOutcome:
    level: str
    probability: float


def _level_index(level: str) -> int:
    if level not in ("g", "e"):
        raise ValidationError(f"detection level must be 'g' or 'e', got {level!r}")
    return LEVELS[level]


def _check_subspace(psi: JointState):
    if psi.atom_levels == 3:
        pf = psi.population(F)
        if pf > F_POPULATION_LIMIT:
            raise InvalidSubspaceError(f"|f> population {pf:.3e} too large to project onto g/e")


def project_atom(psi: JointState, level: str) -> tuple[float, fock.FieldState]:
    """Detect the atom in ``level``; returns (probability, normalized field)."""
    idx = _level_index(level)
    _check_subspace(psi)
    row = psi.row(idx)
    prob = row.norm_squared()
    if prob <= MIN_PROBABILITY:
        raise ImpossibleOutcomeError(f"detection in |{level}> has probability {prob:.3e}", prob)
    return min(prob, 1.0), fock.FieldState(row.amplitudes / math.sqrt(prob))


def outcome_probabilities(psi: JointState) -> dict[str, DetectionOutcome]:
    _check_subspace(psi)
    return {lv: DetectionOutcome(lv, psi.population(LEVELS[lv])) for lv in ("g", "e")}


def _branch_coeffs(c_g, c_e, outcome):
    c_plus = 0.5 * (c_e + c_g)
    c_minus = 0.5 * (c_e - c_g)
    sign = 1.0 if _level_index(outcome) == E else -1.0
    return c_plus, sign * c_minus


def cat_branch_probability(c_g: complex, c_e: complex, alpha: complex, outcome: str) -> float:
    """Squared norm of c+|-alpha> +- c-|alpha> from the 2x2 Gram matrix."""
    a, b = _branch_coeffs(c_g, c_e, outcome)
    s = fock.overlap_analytic(-alpha, alpha).value
    return float((abs(a) ** 2 + abs(b) ** 2 + 2.0 * (a.conjugate() * b * s).real))


def post_measurement_cat(
    c_g: complex, c_e: complex, alpha: complex, outcome: str, n_max: int | None = None
) -> fock.FieldState:
    """Normalized c+|-alpha> + c-|alpha> (outcome e) or c+|-alpha> - c-|alpha> (outcome g)."""
    check_qubit(c_g, c_e)
    c_g, c_e = complex(c_g), complex(c_e)
    prob = cat_branch_probability(c_g, c_e, alpha, outcome)
    if prob < MIN_PROBABILITY:
        raise ImpossibleOutcomeError(f"detection in |{outcome}> has probability {prob:.3e}", prob)
    a, b = _branch_coeffs(c_g, c_e, outcome)
    state = fock.make_coherent(-alpha, n_max).scaled(a) + fock.make_coherent(alpha, n_max).scaled(b)
    return state.normalized()


def sample_outcome(psi: JointState, rng: np.random.Generator | int | None = None) -> str:
    """Draw g or e with Born-rule weights; for Monte Carlo runs only."""
    rng = np.random.default_rng(rng)
    probs = outcome_probabilities(psi)
    pg, pe = probs["g"].probability, probs["e"].probability
    return "g" if rng.random() * (pg + pe) < pg else "e"
