"""Command-line front end.

::

    elicit compare --data forecasts.csv --score pinball:alpha=0.1
    elicit properties --config check.ini
    elicit estimate --config estimate.ini
    elicit simulate --config ranking.ini

Global flags ``--seed``, ``--out`` and ``--format json|csv`` may appear
before or after the sub-command.  Exit codes: 0 success, 1 usage or parse
error, 2 domain violation, 3 a requested property is violated, 4 internal
error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
from dataclasses import dataclass
import io
import json
import math
import os
import sys
from typing import Sequence

import numpy as np

from . import mest, props
from .dist import FiniteDiscrete, evaluate_functional, to_literal
from .errors import DomainError, DomainViolation, ElicitError, ParseError, Unsupported, UsageError
from .literals import parse_distribution, parse_functional, parse_point, parse_score
from .scores import canonical_identification, normalize_score

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_VIOLATED, EXIT_INTERNAL = 0, 1, 2, 3, 4


def fmt(v) -> str:
    """Twelve significant digits, the single float format of all output."""
    return f"{float(v):.12g}"


def round12(obj):
    """Round every float in a JSON-ready structure to 12 significant digits."""
    if isinstance(obj, dict):
        return {k: round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round12(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return float(f"{v:.12g}") if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return round12(obj.tolist())
    return obj


def dumps(obj) -> str:
    return json.dumps(round12(obj), indent=2) + "\n"


# ---------------------------------------------------------------------------
# datasets
# ---------------------------------------------------------------------------


@dataclass
class Dataset:
    """Observations ``y`` and, per forecaster, an ``(n, k)`` forecast array."""

    ids: list
    y: np.ndarray
    names: list
    forecasts: dict
    components: dict

    @property
    def n(self) -> int:
        return int(self.y.size)

    @property
    def dim(self) -> int:
        return self.forecasts[self.names[0]].shape[1] if self.names else 0

    def __eq__(self, other):
        return (
            isinstance(other, Dataset)
            and self.ids == other.ids
            and self.names == other.names
            and self.components == other.components
            and np.array_equal(self.y, other.y)
            and all(np.array_equal(self.forecasts[k], other.forecasts[k]) for k in self.names)
        )


def _cell_float(cell, row, column):
    text = cell.strip()
    if not text:
        raise ParseError(f"missing value in column {column!r}", row)
    try:
        v = float(text)
    except ValueError:
        raise ParseError(f"non-numeric value {text!r} in column {column!r}", row) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite value {text!r} in column {column!r}", row)
    return v


def parse_dataset(path, format: str = "csv") -> Dataset:
    """Read ``id,y,<name>[.component]...``; rows are numbered from the first data row."""
    if format != "csv":
        raise UsageError(f"unsupported dataset format {format!r}")
    try:
        with open(path, newline="") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read dataset {path}: {exc.strerror}") from None
    return parse_dataset_text(text)


def parse_dataset_text(text: str) -> Dataset:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        raise UsageError("dataset is empty")
    header = [h.strip() for h in header]
    if len(header) < 2 or header[0] != "id" or header[1] != "y":
        raise ParseError("header must start with 'id,y'", 0)
    names, comps = [], {}
    for col in header[2:]:
        name, dot, comp = col.partition(".")
        if not name or (dot and not comp):
            raise ParseError(f"bad forecast column {col!r}", 0)
        if name not in comps:
            names.append(name)
            comps[name] = []
        if comps[name] and (not comp or None in comps[name] or comp in comps[name]):
            raise ParseError(f"inconsistent components for forecaster {name!r}", 0)
        comps[name].append(comp or None)
    dims = {len(c) for c in comps.values()}
    if len(dims) > 1:
        raise ParseError("forecasters have different forecast dimensions", 0)
    ids, ys, rows = [], [], []
    for i, rec in enumerate(reader, start=1):
        if not rec or all(not c.strip() for c in rec):
            continue
        if len(rec) != len(header):
            raise ParseError(f"expected {len(header)} cells, found {len(rec)}", i)
        ids.append(rec[0].strip())
        ys.append(_cell_float(rec[1], i, "y"))
        rows.append([_cell_float(c, i, header[j + 2]) for j, c in enumerate(rec[2:])])
    if not ys:
        raise UsageError("dataset has no rows")
    if not names:
        raise UsageError("dataset has no forecast columns")
    arr = np.array(rows, float)
    forecasts, col = {}, 0
    for name in names:
        k = len(comps[name])
        forecasts[name] = arr[:, col : col + k]
        col += k
    return Dataset(ids, np.array(ys), names, forecasts, {k: [c for c in v] for k, v in comps.items()})


def write_dataset(ds: Dataset) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["id", "y"]
    for name in ds.names:
        header += [name if c is None else f"{name}.{c}" for c in ds.components[name]]
    w.writerow(header)
    for t in range(ds.n):
        row = [ds.ids[t], repr(float(ds.y[t]))]
        for name in ds.names:
            row += [repr(float(v)) for v in ds.forecasts[name][t]]
        w.writerow(row)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# compare
# ---------------------------------------------------------------------------


def realized_scores(S, ds: Dataset) -> dict:
    """Mean realized score per forecaster; raises on the first forecast outside the domain."""
    if ds.n == 0:
        raise UsageError("dataset has no rows")
    if ds.dim != S.dim:
        raise UsageError(f"score {S.name} takes {S.dim}-dimensional forecasts, dataset has {ds.dim}")
    out = {}
    for name in ds.names:
        X = ds.forecasts[name].T
        ok = np.asarray(S.domain.mask(X), bool)
        if not ok.all():
            t = int(np.argmin(ok))
            raise DomainViolation(
                f"forecaster {name}, row {t + 1} (id {ds.ids[t]}): forecast {X[:, t].tolist()} "
                f"outside the action domain of {S.name}"
            )
        vals = np.asarray(S.fn(X, ds.y), float)
        if not np.all(np.isfinite(vals)):
            t = int(np.argmin(np.isfinite(vals)))
            raise DomainViolation(f"forecaster {name}, row {t + 1} (id {ds.ids[t]}): score is not finite")
        out[name] = float(vals.mean())
    return out


def compare_table(S, ds: Dataset) -> list:
    """Rows ranked by ascending mean score; tied scores share a rank."""
    scores = realized_scores(S, ds)
    order = sorted(ds.names, key=lambda k: (scores[k], ds.names.index(k)))
    rows, rank = [], 0
    for i, name in enumerate(order):
        if i == 0 or scores[name] != scores[order[i - 1]]:
            rank = i + 1
        row = {"rank": rank, "forecaster": name, "n": ds.n, "mean_score": scores[name]}
        for other in ds.names:
            row[f"diff_vs_{other}"] = scores[name] - scores[other]
        rows.append(row)
    return rows


def render_csv(rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(rows[0]))
    for r in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in r.values()])
    return buf.getvalue()


def cmd_compare(args) -> int:
    if not args.data or not args.score:
        raise UsageError("compare needs --data and --score")
    S = parse_score(args.score)
    if args.normalize:
        try:
            S = normalize_score(S)
        except Unsupported as exc:
            raise UsageError(f"cannot normalise {S.name}: {exc}") from None
    ds = parse_dataset(args.data)
    rows = compare_table(S, ds)
    if (args.format or "csv") == "csv":
        text = render_csv(rows)
    else:
        text = dumps({"score": S.name, "normalized": bool(args.normalize), "ranking": rows})
    _emit(args, "compare." + (args.format or "csv"), text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


class RunConfig:
    """An INI file with sections such as ``[functional]``, ``[score]``, ``[check]`` and ``[io]``."""

    def __init__(self, path):
        self.path = os.fspath(path)
        self.base = os.path.dirname(os.path.abspath(self.path))
        self.cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
        try:
            with open(self.path) as fh:
                self.cp.read_file(fh)
        except OSError as exc:
            raise UsageError(f"cannot read config {self.path}: {exc.strerror}") from None
        except configparser.Error as exc:
            raise UsageError(f"malformed config {self.path}: {exc}") from None

    def get(self, section, key, default=None):
        if self.cp.has_option(section, key):
            return self.cp.get(section, key).strip()
        return default

    def need(self, section, key):
        v = self.get(section, key)
        if v is None or v == "":
            raise UsageError(f"config needs [{section}] {key}")
        return v

    def number(self, section, key, default=None, cast=float):
        v = self.get(section, key)
        if v is None:
            return default
        try:
            return cast(v)
        except ValueError:
            raise UsageError(f"[{section}] {key} = {v!r} is not a number") from None

    def numbers(self, section, key, default=None, cast=float):
        v = self.get(section, key)
        if v is None:
            return default
        try:
            return tuple(cast(t) for t in v.replace(";", ",").split(",") if t.strip())
        except ValueError:
            raise UsageError(f"[{section}] {key} = {v!r} is not a list of numbers") from None

    def distributions(self, section, key="distributions"):
        v = self.get(section, key)
        if v is None:
            return []
        items = [t.strip() for line in v.splitlines() for t in line.split(";")]
        return [parse_distribution(t) for t in items if t]

    def path_of(self, section, key):
        v = self.get(section, key)
        if v is None:
            return None
        return v if os.path.isabs(v) else os.path.join(self.base, v)

    def score(self, key="literal"):
        return parse_score(self.need("score", key))

    def functional(self, S=None):
        lit = self.get("functional", "literal")
        if lit:
            return parse_functional(lit)
        if S is not None and S.target is not None:
            return S.target
        raise UsageError("config needs [functional] literal")


def _seed(args, cfg: RunConfig, section: str) -> int:
    if args.seed is not None:
        return args.seed
    return cfg.number(section, "seed", 0, int)


def _check_config(cfg: RunConfig, seed: int) -> props.CheckConfig:
    kw = {"rng_seed": seed}
    for key, cast in (
        ("n_grid", int),
        ("radius", float),
        ("n_random", int),
        ("tol_eq", float),
        ("tol_mono", float),
        ("s_max", float),
        ("n_s", int),
        ("p", float),
        ("n_chains", int),
    ):
        v = cfg.number("check", key, None, cast)
        if v is not None:
            kw[key] = v
    radii = cfg.numbers("check", "radii")
    if radii:
        kw["radii"] = radii
    try:
        return props.CheckConfig(**kw)
    except DomainError as exc:
        raise UsageError(f"[check]: {exc}") from None


# ---------------------------------------------------------------------------
# properties
# ---------------------------------------------------------------------------

PROPERTIES = (
    "consistency",
    "componentwise",
    "line_segments",
    "metrical",
    "self_calibration",
    "orientation",
    "identification",
    "separability",
)


def run_properties(cfg: RunConfig, seed: int) -> dict:
    S = cfg.score()
    T = cfg.functional(S)
    dists = cfg.distributions("check")
    if not dists:
        raise UsageError("config needs [check] distributions")
    wanted = [t.strip() for t in cfg.need("check", "properties").replace(";", ",").split(",") if t.strip()]
    for w in wanted:
        if w not in PROPERTIES:
            raise UsageError(f"unknown property {w!r}; choose from {', '.join(PROPERTIES)}")
    cc = _check_config(cfg, seed)
    reports = {}
    for w in wanted:
        if w == "consistency":
            reports[w] = props.check_consistency(S, T, dists, cc)
        elif w in ("componentwise", "line_segments", "metrical"):
            reports[w] = props.check_order_sensitivity(S, T, w, dists, cc)
        elif w == "self_calibration":
            eps = cfg.numbers("check", "epsilons", (0.1, 0.5, 1.0))
            reports[w] = props.check_self_calibration(S, T, dists, eps, cc)
        elif w == "orientation":
            reports[w] = props.check_orientation(canonical_identification(T), T, dists, cc)
        elif w == "identification":
            reports[w] = props.check_identification(canonical_identification(T), T, dists, cc.tol_eq)
        elif w == "separability":
            reports[w] = props.check_separability(S, T, dists, cc)
    return reports


def cmd_properties(args) -> int:
    cfg = _load(args)
    reports = run_properties(cfg, _seed(args, cfg, "check"))
    fmt_ = _format(args, cfg)
    lines = []
    for name, rep in reports.items():
        body = dumps(rep.to_dict()) if fmt_ == "json" else _witness_csv(rep)
        _write(args, cfg, f"{name}.{fmt_}", body)
        lines.append(f"{name}: {rep.verdict} (worst margin {fmt(rep.worst_margin())})")
    print("\n".join(lines))
    return EXIT_VIOLATED if any(r.violated for r in reports.values()) else EXIT_OK


def _witness_csv(rep) -> str:
    d = rep.to_dict()
    if not d["witnesses"]:
        return "property,verdict\n" + f"{rep.prop},{rep.verdict}\n"
    keys = []
    for w in d["witnesses"]:
        keys += [k for k in w if k not in keys]
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["property", "verdict"] + keys)
    for w in d["witnesses"]:
        wr.writerow([rep.prop, rep.verdict] + [_flat(w.get(k, "")) for k in keys])
    return buf.getvalue()


def _flat(v):
    if isinstance(v, (list, tuple)):
        return ";".join(_flat(x) for x in v)
    if isinstance(v, float):
        return fmt(v)
    return str(v)


# ---------------------------------------------------------------------------
# estimate and simulate
# ---------------------------------------------------------------------------


def _observations(cfg: RunConfig, seed: int):
    data = cfg.path_of("estimate", "data")
    if data:
        column = cfg.get("estimate", "column", "y")
        ds_text = _read(data)
        reader = csv.DictReader(io.StringIO(ds_text))
        if reader.fieldnames is None or column not in [f.strip() for f in reader.fieldnames]:
            raise UsageError(f"{data} has no column {column!r}")
        ys = []
        for i, row in enumerate(reader, start=1):
            row = {k.strip(): v for k, v in row.items()}
            ys.append(_cell_float(row[column] or "", i, column))
        if not ys:
            raise UsageError(f"{data} has no rows")
        return np.array(ys), data
    lit = cfg.get("estimate", "distribution")
    if lit is None:
        raise UsageError("config needs [estimate] data or distribution")
    n = cfg.number("estimate", "n", None, int)
    if n is None:
        raise UsageError("config needs [estimate] n when sampling")
    smp = mest.sample(parse_distribution(lit), n, seed)
    return smp.observations, smp.source


def cmd_estimate(args) -> int:
    cfg = _load(args)
    seed = _seed(args, cfg, "estimate")
    S = cfg.score()
    mode = cfg.get("estimate", "mode", "fit")
    fmt_ = _format(args, cfg)
    if mode == "consistency":
        T = cfg.functional(S)
        F = parse_distribution(cfg.need("estimate", "distribution"))
        ns = cfg.numbers("estimate", "ns", None, int)
        if not ns:
            raise UsageError("config needs [estimate] ns")
        reps = cfg.number("estimate", "reps", 10, int)
        res = mest.consistency_experiment(S, T, F, ns, reps, seed)
        _write(args, cfg, "consistency.csv", res.to_csv())
        _write(args, cfg, "consistency.json", dumps(res.summary))
        for a in res.summary["per_n"]:
            print(f"n={a['n']} mean_error={fmt(a['mean_error'])} max_error={fmt(a['max_error'])}")
        print(f"verdict: {res.summary['verdict']}")
        return EXIT_OK
    if mode != "fit":
        raise UsageError(f"[estimate] mode must be 'fit' or 'consistency', got {mode!r}")
    y, source = _observations(cfg, seed)
    x = mest.fit(S, None, y)
    out = {"score": S.name, "source": source, "n": int(y.size), "seed": seed, "estimate": x.tolist()}
    lit = cfg.get("functional", "literal") or (S.target.label() if S.target is not None else None)
    if lit:
        T = parse_functional(lit)
        emp = FiniteDiscrete(tuple((float(v), 1.0 / y.size) for v in y))
        try:
            out["functional"] = T.label()
            out["empirical_value"] = evaluate_functional(T, emp, require_unique=False).tolist()
        except ElicitError as exc:
            out["empirical_value_error"] = str(exc)
    if fmt_ == "json":
        body = dumps(out)
    else:
        body = "coordinate,estimate\n" + "".join(f"{i + 1},{fmt(v)}\n" for i, v in enumerate(x))
    _write(args, cfg, f"estimate.{fmt_}", body)
    print("estimate: " + ", ".join(fmt(v) for v in x))
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _load(args)
    seed = _seed(args, cfg, "simulate")
    S1 = cfg.score("literal")
    S2 = cfg.score("literal2")
    T = cfg.functional(S1)
    F = parse_distribution(cfg.need("simulate", "distribution"))
    a = parse_point(cfg.need("simulate", "forecast_a"), S1.dim)
    b = parse_point(cfg.need("simulate", "forecast_b"), S1.dim)
    n = cfg.number("simulate", "n", 100, int)
    reps = cfg.number("simulate", "reps", 100, int)
    res = mest.ranking_experiment(S1, S2, T, F, a, b, n, reps, seed)
    _write(args, cfg, "ranking.csv", res.to_csv())
    _write(args, cfg, "ranking.json", dumps(res.summary))
    pop = res.summary["population"]
    print(f"disagreement_fraction: {fmt(res.summary['disagreement_fraction'])}")
    print(f"population: {S1.name} prefers {pop['s1']['prefers']}, {S2.name} prefers {pop['s2']['prefers']}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# plumbing
# ---------------------------------------------------------------------------


def _read(path):
    try:
        with open(path, newline="") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load(args) -> RunConfig:
    if not args.config:
        raise UsageError(f"{args.command} needs --config")
    return RunConfig(args.config)


def _format(args, cfg: RunConfig | None) -> str:
    f = args.format or (cfg.get("io", "format") if cfg else None) or "json"
    if f not in ("json", "csv"):
        raise UsageError(f"format must be json or csv, got {f!r}")
    return f


def _out_dir(args, cfg: RunConfig | None):
    if args.out:
        return args.out
    return cfg.path_of("io", "out") if cfg else None


def _write(args, cfg, name, text):
    """Write ``text`` under the output directory, or to stdout when there is none."""
    out = _out_dir(args, cfg)
    if out is None:
        sys.stdout.write(text)
        return
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, name), "w", newline="") as fh:
        fh.write(text)


def _emit(args, name, text):
    sys.stdout.write(text)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, name), "w", newline="") as fh:
            fh.write(text)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _u64(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"{text} is outside [0, 2^64)")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=_u64, default=argparse.SUPPRESS, help="RNG seed (unsigned 64-bit)")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output directory")
    common.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)

    parser = _Parser(prog="elicit", description="Evaluate forecasts with consistent scoring functions.", parents=[common])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    p = sub.add_parser("compare", parents=[common], help="rank forecasters by realized mean score")
    p.add_argument("--data", help="CSV with header id,y,<name>[.component]...")
    p.add_argument("--score", help="score literal, e.g. pinball:alpha=0.1")
    p.add_argument("--normalize", action="store_true", help="subtract S(T(delta_y), y) from every score")
    for name, text in (
        ("properties", "run property verifiers from a config file"),
        ("estimate", "fit by empirical score minimisation or run a consistency experiment"),
        ("simulate", "ranking-divergence experiment for two scores"),
    ):
        q = sub.add_parser(name, parents=[common], help=text)
        q.add_argument("--config", help="INI configuration file")
    return parser


COMMANDS = {"compare": cmd_compare, "properties": cmd_properties, "estimate": cmd_estimate, "simulate": cmd_simulate}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        for key in ("seed", "out", "format"):
            if not hasattr(args, key):
                setattr(args, key, None)
        if not args.command:
            raise UsageError("choose a command: compare, properties, estimate or simulate")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"elicit: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainViolation, DomainError) as exc:
        print(f"elicit: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ElicitError as exc:
        print(f"elicit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - last-resort mapping to the internal exit code
        print(f"elicit: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
