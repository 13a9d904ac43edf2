"""Command-line front end.

    ramansim run         one protocol instance, JSON (default) or CSV
    ramansim sweep       Cartesian parameter grid from a config file, CSV
    ramansim validate    regime margins for given parameters
    ramansim feasibility overlap / timing table for the laboratory preset
    ramansim presets     print the preset values

Config files are JSON and are checked against ``CONFIG_SCHEMA`` (unknown keys
are rejected).  Command-line flags override the config file.  Exit codes:
0 ok, 2 config/validation error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import warnings

import jsonschema

from . import fock, protocol
from .dynamics import RamanParams, transfer_time
from .errors import RamanSimError, ValidationError

__all__ = ["main", "CONFIG_SCHEMA", "format_number", "format_table", "reformat_csv"]

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
DEFAULT_NMAX_CAP = 5000
DEFAULT_PRECISION = 3

_complex = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}
_number_list = {"type": "array", "items": {"type": "number"}, "minItems": 1}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "c_g": _complex,
        "c_e": _complex,
        "alpha": _complex,
        "lambda": {"type": "number"},
        "delta": {"type": "number"},
        "omega0": {"type": "number"},
        "omega_f": {"type": "number"},
        "omega": {"type": "number"},
        "outcome": {"enum": ["g", "e"]},
        "t": {"type": ["number", "null"]},
        "n_max": {"type": ["integer", "null"], "minimum": 0},
        "with_full_model": {"type": "boolean"},
        "workers": {"type": "integer", "minimum": 1},
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {axis: _number_list for axis in protocol.SWEEP_AXES},
        },
        "metrics": {"type": "array", "items": {"enum": list(protocol.SWEEP_METRICS)}},
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "format": {"enum": ["csv", "json", "text"]},
                "path": {"type": "string"},
                "precision": {"type": "integer", "minimum": 1, "maximum": 17},
            },
        },
    },
}

DEFAULT_METRICS = ["fidelity_to_target", "infidelity", "overlap", "margins"]


class ConfigError(RamanSimError):
    category = "config"


def _to_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(v)


def _parse_complex_flag(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}")


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}")
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config {path}: {where}: {exc.message}")
    return cfg


def _nmax_cap() -> int:
    raw = os.environ.get("RAMANSIM_NMAX_CAP")
    if raw is None:
        return DEFAULT_NMAX_CAP
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"RAMANSIM_NMAX_CAP must be an integer, got {raw!r}")


def resolve(args, cfg: dict) -> tuple[dict, list[str]]:
    """Merge defaults < config file < flags.  Returns (settings, defaulted keys)."""
    preset = protocol.LAB_PRESET
    defaults = {
        "c_g": 0.6,
        "c_e": 0.8,
        "alpha": 3.0,
        "lambda": preset.lambda_coupling,
        "delta": preset.delta,
        "omega0": None,
        "omega_f": None,
        "omega": None,
        "outcome": "g",
        "t": None,
        "n_max": None,
        "with_full_model": False,
        "workers": 1,
        "metrics": DEFAULT_METRICS,
        "grid": None,
        "format": None,
        "path": None,
        "precision": DEFAULT_PRECISION,
    }
    flat = dict(cfg)
    flat.update(flat.pop("output", {}))
    flags = {
        "c_g": getattr(args, "c_g", None),
        "c_e": getattr(args, "c_e", None),
        "alpha": getattr(args, "alpha", None),
        "lambda": getattr(args, "lambda_", None),
        "delta": getattr(args, "delta", None),
        "outcome": getattr(args, "outcome", None),
        "t": getattr(args, "t", None),
        "n_max": getattr(args, "n_max", None),
        "format": getattr(args, "format", None),
        "path": getattr(args, "out", None),
        "precision": getattr(args, "precision", None),
        "workers": getattr(args, "workers", None),
    }
    if getattr(args, "with_full_model", False):
        flags["with_full_model"] = True
    settings, defaulted = {}, []
    for key, default in defaults.items():
        if flags.get(key) is not None:
            settings[key] = flags[key]
        elif key in flat:
            settings[key] = flat[key]
        else:
            settings[key] = default
            if default is not None:
                defaulted.append(key)
    for key in ("c_g", "c_e", "alpha"):
        settings[key] = _to_complex(settings[key])
    if settings["t"] is not None and not settings["t"] > 0:
        raise ValidationError(f"interaction time t must be > 0, got {settings['t']}")
    return settings, defaulted


def _params(s: dict) -> RamanParams:
    return RamanParams(
        s["lambda"], s["delta"], s["alpha"], omega0=s["omega0"], omega_f=s["omega_f"], omega=s["omega"]
    )


def _check_cap(n_max: int):
    cap = _nmax_cap()
    if n_max > cap:
        raise ConfigError(f"n_max={n_max} exceeds RAMANSIM_NMAX_CAP={cap}")


def format_number(x, precision: int = DEFAULT_PRECISION) -> str:
    """Scientific notation with ``precision`` significant digits; non-numbers as text."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, float)):
        x = float(x)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return f"{x:.{precision - 1}e}"
    if isinstance(x, complex):
        return f"{format_number(x.real, precision)}{'+' if x.imag >= 0 else '-'}{format_number(abs(x.imag), precision)}j"
    return str(x)


def _plain(v):
    """Complex axis values that are really real print as reals."""
    if isinstance(v, complex) and v.imag == 0:
        return v.real
    return v


def format_table(rows: list[dict], columns: list[str], precision: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([format_number(_plain(row.get(c)), precision) for c in columns])
    return buf.getvalue()


def reformat_csv(text: str, precision: int) -> str:
    """Parse a table written by ``format_table`` and write it again."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    rows = []
    for rec in reader:
        row = {}
        for col, cell in zip(header, rec):
            if cell == "":
                row[col] = None
            elif cell in ("true", "false"):
                row[col] = cell == "true"
            else:
                try:
                    row[col] = float(cell)
                except ValueError:
                    row[col] = cell
        rows.append(row)
    return format_table(rows, header, precision)


def _json_default(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _finite(obj):
    """Non-finite floats become strings so the output stays strict JSON."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return format_number(obj)
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    if isinstance(obj, complex):
        return [_finite(obj.real), _finite(obj.imag)]
    return obj


def _dump_json(obj) -> str:
    return json.dumps(_finite(obj), indent=2, sort_keys=True, default=_json_default, allow_nan=False) + "\n"


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_run(args) -> int:
    s, defaulted = resolve(args, load_config(args.config))
    p = _params(s)
    cfg = protocol.ProtocolConfig(s["c_g"], s["c_e"], p, s["outcome"], s["t"], s["n_max"])
    _check_cap(cfg.cutoff)
    res = protocol.run_protocol(cfg, with_full_model=s["with_full_model"])
    summary = protocol.result_summary(res)
    effective = {
        "c_g": s["c_g"],
        "c_e": s["c_e"],
        "alpha": p.alpha,
        "lambda": p.lambda_coupling,
        "delta": p.delta,
        "beta": p.beta,
        "outcome": cfg.outcome,
        "t": cfg.t,
        "n_max": cfg.cutoff,
    }
    if s["t"] is None:
        defaulted.append("t")
    if s["n_max"] is None:
        defaulted.append("n_max")
    summary["effective"] = effective
    summary["defaulted"] = sorted(set(defaulted) & set(effective))
    fmt = s["format"] or "json"
    if fmt == "csv":
        row = {k: v for k, v in summary.items() if not isinstance(v, (dict, list))}
        text = format_table([row], list(row), s["precision"])
    else:
        text = _dump_json(summary)
    _emit(text, s["path"])
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg_file = load_config(args.config)
    s, _ = resolve(args, cfg_file)
    if not s["grid"]:
        raise ConfigError("sweep needs a non-empty 'grid' in the config file")
    base = _params(s)
    for a in s["grid"].get("alpha", [base.alpha]):
        _check_cap(s["n_max"] if s["n_max"] is not None else fock.default_cutoff(a))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rows = protocol.sweep(
            s["grid"],
            s["metrics"],
            c_g=s["c_g"],
            c_e=s["c_e"],
            base=base,
            outcome=s["outcome"],
            n_max=s["n_max"],
            workers=s["workers"],
        )
    for w in caught:
        sys.stderr.write(f"warning: {w.message}\n")
    axes = [a for a in protocol.SWEEP_AXES if a in s["grid"]]
    columns = axes + protocol.metric_columns(s["metrics"]) + ["error"]
    fmt = s["format"] or "csv"
    if fmt == "json":
        text = _dump_json([{c: row.get(c) for c in columns} for row in rows])
    else:
        text = format_table(rows, columns, s["precision"])
    _emit(text, s["path"])
    return EXIT_OK


def cmd_validate(args) -> int:
    s, defaulted = resolve(args, load_config(args.config))
    p = _params(s)
    t = s["t"] if s["t"] is not None else transfer_time(p)
    m1, m2 = protocol.check_validity(p, t)
    report = {
        "lambda": p.lambda_coupling,
        "delta": p.delta,
        "alpha": p.alpha,
        "beta": p.beta,
        "t": t,
        "t_defaulted": s["t"] is None,
        "margin1": m1,
        "margin2": m2,
        "margin1_satisfied": m1 >= protocol.REGIME_THRESHOLD,
        "margin2_satisfied": m2 >= protocol.REGIME_THRESHOLD,
        "degenerate": math.isinf(m1),
    }
    fmt = s["format"] or "text"
    prec = s["precision"]
    if fmt == "json":
        text = _dump_json(report)
    elif fmt == "csv":
        text = format_table([report], list(report), prec)
    else:
        src = " (default pi/(2|beta|))" if s["t"] is None else ""
        text = (
            f"lambda={p.lambda_coupling:g} kHz, delta={p.delta:g} kHz, alpha={_plain(p.alpha):g}, beta={p.beta:g} kHz\n"
            f"t={t:.6g} ms{src}\n"
            f"margin1={m1:.4g} ({'ok' if report['margin1_satisfied'] else 'weak'})\n"
            f"margin2={m2:.4g} ({'ok' if report['margin2_satisfied'] else 'weak'})\n"
        )
    _emit(text, s["path"])
    return EXIT_OK


def cmd_feasibility(args) -> int:
    rows = protocol.feasibility_report(protocol.LAB_PRESET)
    fmt = args.format or "text"
    prec = args.precision or DEFAULT_PRECISION
    if fmt == "json":
        text = _dump_json({"preset": protocol.preset_dict(), "rows": rows})
    elif fmt == "csv":
        text = format_table(rows, list(rows[0]), prec)
    else:
        pr = protocol.LAB_PRESET
        lines = [
            f"lambda={pr.lambda_coupling:g} kHz, delta={pr.delta:g} kHz, Q={pr.quality_factor:g}, "
            f"T_c={pr.cavity_lifetime:g} s, gate={pr.hadamard_gate_time:g} s, v={pr.atomic_velocity:g} m/s"
        ]
        for r in rows:
            lines.append(
                f"alpha={r['alpha']:g}, log10_overlap={r['log10_overlap']:.2f}, order=1e{r['overlap_order']}, "
                f"margin1={r['margin1']:.4g}, margin2={r['margin2']:.4g}, t={r['interaction_time_ms']:.4g} ms"
            )
        ok = all(r["gate_within_lifetime"] for r in rows)
        lines.append(
            f"gate_time={pr.hadamard_gate_time:g} s < cavity_lifetime={pr.cavity_lifetime:g} s: "
            f"{'feasible' if ok else 'NOT feasible'}"
        )
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_presets(args) -> int:
    _emit(_dump_json(protocol.preset_dict()), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ramansim", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def physics_flags(sp):
        sp.add_argument("--config", metavar="PATH")
        sp.add_argument("--alpha", type=_parse_complex_flag)
        sp.add_argument("--lambda", dest="lambda_", type=float, metavar="LAMBDA")
        sp.add_argument("--delta", type=float)
        sp.add_argument("--t", type=float, help="interaction time in ms (default pi/(2|beta|))")
        sp.add_argument("--n-max", dest="n_max", type=int)
        sp.add_argument("--c-g", dest="c_g", type=_parse_complex_flag)
        sp.add_argument("--c-e", dest="c_e", type=_parse_complex_flag)
        sp.add_argument("--outcome", choices=["g", "e"])
        sp.add_argument("--format", choices=["csv", "json", "text"])
        sp.add_argument("--out", metavar="PATH")
        sp.add_argument("--precision", type=int)

    run = sub.add_parser("run", help="run one protocol instance")
    physics_flags(run)
    run.add_argument("--with-full-model", action="store_true")
    run.set_defaults(func=cmd_run)

    sw = sub.add_parser("sweep", help="parameter sweep from a config grid")
    physics_flags(sw)
    sw.add_argument("--with-full-model", action="store_true")
    sw.add_argument("--workers", type=int)
    sw.set_defaults(func=cmd_sweep)

    val = sub.add_parser("validate", help="regime validity margins")
    physics_flags(val)
    val.set_defaults(func=cmd_validate)

    feas = sub.add_parser("feasibility", help="laboratory feasibility table")
    feas.add_argument("--format", choices=["csv", "json", "text"])
    feas.add_argument("--out", metavar="PATH")
    feas.add_argument("--precision", type=int)
    feas.set_defaults(func=cmd_feasibility)

    pre = sub.add_parser("presets", help="print preset parameters")
    pre.add_argument("--out", metavar="PATH")
    pre.set_defaults(func=cmd_presets)
    return parser


def _fail(category: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": category, "message": message}) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ValidationError) as exc:
        return _fail(exc.category, str(exc), EXIT_CONFIG)
    except RamanSimError as exc:
        return _fail(exc.category, str(exc), EXIT_NUMERIC)
    except OSError as exc:
        return _fail("io", str(exc), EXIT_CONFIG)


if __name__ == "__main__":
    sys.exit(main())
