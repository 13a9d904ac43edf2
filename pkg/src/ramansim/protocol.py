"""Atom-to-cat-qubit transfer: Raman evolution, selective detection, cat Hadamard.

The pipeline for one configuration is::

    evolve_closed_form -> project_atom -> hadamard_literal -> normalize
        -> decompose -> compare with the target cat qubit

Detection in |g> should leave c_g|-alpha> + c_e|alpha>; detection in |e>
leaves the swapped c_e|-alpha> + c_g|alpha>.
"""

from __future__ import annotations

import itertools
import logging
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

from . import fock
from .catgate import CatQubit, decompose, embed, gate_error, hadamard_literal
from .dynamics import (
    RamanParams,
    check_qubit,
    compare_models,
    evolve_closed_form,
    transfer_time,
    validity_margins,
)
from .errors import RamanSimError, ValidationError
from .measurement import project_atom

log = logging.getLogger(__name__)

__all__ = [
    "ProtocolConfig",
    "ProtocolResult",
    "ExperimentPreset",
    "LAB_PRESET",
    "REGIME_THRESHOLD",
    "run_protocol",
    "check_validity",
    "feasibility_report",
    "sweep",
    "SWEEP_AXES",
    "SWEEP_METRICS",
    "metric_columns",
    "result_summary",
    "preset_dict",
]

# A margin counts as "much greater than" once it reaches this value.
REGIME_THRESHOLD = 10.0


@dataclass(frozen=True)
class ProtocolConfig:
    c_g: complex
    c_e: complex
    params: RamanParams
    outcome: str = "g"
    t_override: float | None = None
    n_max: int | None = None

    def __post_init__(self):
        check_qubit(self.c_g, self.c_e)
        if self.outcome not in ("g", "e"):
            raise ValidationError(f"outcome must be 'g' or 'e', got {self.outcome!r}")
        if self.t_override is not None and not self.t_override > 0:
            raise ValidationError(f"interaction time must be > 0, got {self.t_override}")

    @property
    def t(self) -> float:
        return self.t_override if self.t_override is not None else transfer_time(self.params)

    @property
    def cutoff(self) -> int:
        return self.n_max if self.n_max is not None else fock.default_cutoff(self.params.alpha)


@dataclass(frozen=True, eq=False)
class ProtocolResult:
    outcome: str
    probability: float
    field_after_gate: fock.FieldState
    cat: CatQubit
    residual: float
    fidelity_to_target: float
    infidelity: float
    t: float
    n_max: int
    margin1: float
    margin2: float
    regime_warnings: tuple[str, ...] = ()
    model_infidelity: float | None = None
    f_leakage: float | None = None

    def target_coefficients(self, c_g, c_e):
        return (c_g, c_e) if self.outcome == "g" else (c_e, c_g)


@dataclass(frozen=True)
class ExperimentPreset:
    """Order-of-magnitude laboratory numbers for Rydberg atoms in a
    superconducting microwave cavity."""

    lambda_coupling: float = 10.0  # kHz
    delta: float = 1.0e3  # kHz
    quality_factor: float = 1.0e11
    cavity_lifetime: float = 1.0e-1  # s
    hadamard_gate_time: float = 1.0e-2  # s
    atomic_velocity: float = 1.0e3  # m/s
    alphas: tuple[float, ...] = (2.0, 3.0, 5.0, 10.0)

    def params(self, alpha: complex) -> RamanParams:
        return RamanParams(self.lambda_coupling, self.delta, alpha)


LAB_PRESET = ExperimentPreset()


def check_validity(p: RamanParams, t: float) -> tuple[float, float]:
    """Margins of the two regime inequalities (> 1 satisfied, >= 10 comfortable).

    Both are ``inf`` for alpha = 0 or lambda = 0 (degenerate, nothing to check).
    """
    return validity_margins(p, t)


def _regime_warnings(m1, m2):
    out = []
    if m1 < REGIME_THRESHOLD:
        out.append(f"large-detuning margin {m1:.3g} < {REGIME_THRESHOLD:g}")
    if m2 < REGIME_THRESHOLD:
        out.append(f"short-time margin {m2:.3g} < {REGIME_THRESHOLD:g}")
    return tuple(out)


def run_protocol(cfg: ProtocolConfig, with_full_model: bool = False) -> ProtocolResult:
    p = cfg.params
    t = cfg.t
    n_max = cfg.cutoff
    m1, m2 = check_validity(p, t)
    notes = _regime_warnings(m1, m2)
    for w in notes:
        log.info("regime: %s", w)

    psi = evolve_closed_form(cfg.c_g, cfg.c_e, p, t, n_max)
    prob, field_state = project_atom(psi, cfg.outcome)
    after = hadamard_literal(field_state, p.alpha).normalized()
    cat, residual = decompose(after, p.alpha)

    a, b = (cfg.c_g, cfg.c_e) if cfg.outcome == "g" else (cfg.c_e, cfg.c_g)
    target = embed(CatQubit(p.alpha, a, b), n_max)
    inf = fock.infidelity(target, after)

    model_inf = leak = None
    if with_full_model:
        report = compare_models(p, cfg.c_g, cfg.c_e, t, n_max)
        model_inf, leak = report.infidelity, report.f_leakage

    return ProtocolResult(
        outcome=cfg.outcome,
        probability=prob,
        field_after_gate=after,
        cat=cat,
        residual=residual,
        fidelity_to_target=fock.fidelity(target, after),
        infidelity=inf,
        t=t,
        n_max=n_max,
        margin1=m1,
        margin2=m2,
        regime_warnings=notes,
        model_infidelity=model_inf,
        f_leakage=leak,
    )


def feasibility_report(preset: ExperimentPreset = LAB_PRESET) -> list[dict]:
    """One row per candidate alpha: overlap size, regime margins, timing budget.

    Times are reported in ms (interaction) and s (gate, cavity lifetime).
    """
    rows = []
    for alpha in preset.alphas:
        p = preset.params(alpha)
        ov = fock.overlap_analytic(alpha, -alpha)
        t = transfer_time(p)
        m1, m2 = check_validity(p, t)
        t_s = t * 1e-3
        rows.append(
            {
                "alpha": alpha,
                "overlap": ov.magnitude,
                "log10_overlap": ov.log10_magnitude,
                "overlap_order": math.floor(ov.log10_magnitude),
                "margin1": m1,
                "margin2": m2,
                "interaction_time_ms": t,
                "hadamard_gate_time_s": preset.hadamard_gate_time,
                "cavity_lifetime_s": preset.cavity_lifetime,
                "interaction_within_lifetime": t_s < preset.cavity_lifetime,
                "gate_within_lifetime": preset.hadamard_gate_time < preset.cavity_lifetime,
                "total_within_lifetime": t_s + preset.hadamard_gate_time < preset.cavity_lifetime,
            }
        )
    return rows


SWEEP_AXES = ("alpha", "delta", "lambda", "t")
SWEEP_METRICS = (
    "fidelity_to_target",
    "infidelity",
    "probability",
    "overlap",
    "gate_error",
    "margins",
    "model_infidelity",
)


@dataclass(frozen=True)
class _SweepJob:
    point: dict
    c_g: complex
    c_e: complex
    outcome: str
    base: RamanParams
    metrics: tuple[str, ...]
    n_max: int | None = None


def _dedupe(values, axis):
    out = []
    for v in values:
        if v in out:
            warnings.warn(f"duplicate value {v!r} in sweep axis {axis!r} dropped", stacklevel=3)
            continue
        out.append(v)
    return out


def _grid_points(grid: dict) -> list[dict]:
    unknown = set(grid) - set(SWEEP_AXES)
    if unknown:
        raise ValidationError(f"unknown sweep axes: {sorted(unknown)}")
    axes = [a for a in SWEEP_AXES if a in grid]
    if not axes:
        raise ValidationError("sweep grid is empty")
    values = []
    for a in axes:
        vals = list(grid[a])
        if not vals:
            raise ValidationError(f"sweep axis {a!r} has no values")
        values.append(sorted(_dedupe(vals, a), key=lambda v: (complex(v).real, complex(v).imag)))
    return [dict(zip(axes, combo)) for combo in itertools.product(*values)]


def _evaluate(job: _SweepJob) -> dict:
    pt = job.point
    row = dict(pt)
    try:
        changes = {}
        if "alpha" in pt:
            changes["alpha"] = pt["alpha"]
        if "delta" in pt:
            changes["delta"] = pt["delta"]
        if "lambda" in pt:
            changes["lambda_coupling"] = pt["lambda"]
        p = job.base.replace(**changes)
        cfg = ProtocolConfig(job.c_g, job.c_e, p, job.outcome, pt.get("t"), job.n_max)
        want = set(job.metrics)
        if want & {"fidelity_to_target", "infidelity", "probability", "model_infidelity"}:
            res = run_protocol(cfg, with_full_model="model_infidelity" in want)
        else:
            res = None
        for m in job.metrics:
            if m == "fidelity_to_target":
                row[m] = res.fidelity_to_target
            elif m == "infidelity":
                row[m] = res.infidelity
            elif m == "probability":
                row[m] = res.probability
            elif m == "overlap":
                row[m] = fock.overlap_analytic(p.alpha, -p.alpha).magnitude
            elif m == "gate_error":
                row[m] = gate_error(p.alpha, n_max=job.n_max)
            elif m == "margins":
                row["margin1"], row["margin2"] = check_validity(p, cfg.t)
            elif m == "model_infidelity":
                row[m] = res.model_infidelity
                row["f_leakage"] = res.f_leakage
        row["error"] = ""
    except RamanSimError as exc:
        row["error"] = f"{exc.category}: {exc}"
    return row


def metric_columns(metrics) -> list[str]:
    cols = []
    for m in metrics:
        if m == "margins":
            cols += ["margin1", "margin2"]
        elif m == "model_infidelity":
            cols += ["model_infidelity", "f_leakage"]
        else:
            cols.append(m)
    return cols


def sweep(
    grid: dict,
    metrics,
    c_g: complex = 0.6,
    c_e: complex = 0.8,
    base: RamanParams | None = None,
    outcome: str = "g",
    n_max: int | None = None,
    workers: int | None = None,
) -> list[dict]:
    """Evaluate ``metrics`` at every point of the Cartesian ``grid``.

    ``grid`` maps axis names ("alpha", "delta", "lambda", "t") to value lists.
    Rows come back in lexicographic grid order (axes in that fixed order,
    values ascending) whatever ``workers`` is.  A failing point gets its error
    recorded in the ``error`` column instead of aborting the sweep.
    """
    metrics = tuple(metrics)
    if not metrics:
        raise ValidationError("no sweep metrics selected")
    bad = [m for m in metrics if m not in SWEEP_METRICS]
    if bad:
        raise ValidationError(f"unknown sweep metrics: {bad}")
    check_qubit(c_g, c_e)
    if base is None:
        base = LAB_PRESET.params(3.0)
    jobs = [
        _SweepJob(pt, complex(c_g), complex(c_e), outcome, base, metrics, n_max)
        for pt in _grid_points(grid)
    ]
    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_evaluate, jobs))
    return [_evaluate(j) for j in jobs]


def result_summary(res: ProtocolResult) -> dict:
    """JSON-friendly view of a result (field amplitudes omitted)."""
    cat = res.cat
    out = {
        "outcome": res.outcome,
        "probability": res.probability,
        "fidelity_to_target": res.fidelity_to_target,
        "infidelity": res.infidelity,
        "residual": res.residual,
        "cat": {
            "alpha": [cat.alpha.real, cat.alpha.imag],
            "a": [cat.a.real, cat.a.imag],
            "b": [cat.b.real, cat.b.imag],
            "s": cat.s,
        },
        "t": res.t,
        "n_max": res.n_max,
        "margin1": res.margin1,
        "margin2": res.margin2,
        "regime_warnings": list(res.regime_warnings),
        "model_infidelity": res.model_infidelity,
        "f_leakage": res.f_leakage,
    }
    return out


def preset_dict(preset: ExperimentPreset = LAB_PRESET) -> dict:
    d = asdict(preset)
    d["alphas"] = list(d["alphas"])
    return d
