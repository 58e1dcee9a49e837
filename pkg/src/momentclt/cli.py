"""Command-line front end: ``momentclt run | validate | list``.

A run reads one JSON config, executes the named experiment and writes
``<prefix>.json`` and ``<prefix>.csv`` to the output directory. Exit codes:
0 all assertions hold, 2 an assertion failed, 3 configuration or model error,
4 a size cap was hit.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

from . import __version__
from .clt_harness import (
    MAProcess,
    condition_diagnostics,
    mixing_profile,
    run_clt_experiment,
    verify_mixing_lemma,
)
from .errors import ArgumentError, ConfigError, ModelError, MomentCLTError, NumericalError, SizeError
from .index_spaces import SpaceFamily, box_family, make_box, make_window, space_from_descriptor, verify_counting_lemma
from .moment_engine import MomentEngine, gamma, separation_sweep, sigma2
from .processes import (
    ArmaModel,
    InnovationSpec,
    arma_reduce,
    arma_to_ma,
    make_digit_process,
    make_markov_chain,
    nonmixing_witness,
    truncate_coefficients,
)
from .processes.chains import DigitProcess, MarkovChain

SCHEMA_VERSION = 1
OUTPUT_ENV = "MOMENTCLT_OUTPUT_DIR"
DEFAULT_OUTPUT = "momentclt-output"

EXIT_OK, EXIT_ASSERTION, EXIT_CONFIG, EXIT_SIZE = 0, 2, 3, 4


# ---------------------------------------------------------------- config handling


def _parse_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(cfg: dict, overrides: list[str]) -> dict:
    """Set dotted keys, e.g. ``params.R=500``; values are parsed as JSON when possible."""
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(item, "override must look like key=value")
        key, raw = item.split("=", 1)
        node = cfg
        parts = key.strip().split(".")
        for p in parts[:-1]:
            node = node.setdefault(p, {})
            if not isinstance(node, dict):
                raise ConfigError(key, f"{p} is not an object")
        node[parts[-1]] = _parse_value(raw)
    return cfg


def load_config(path: str | os.PathLike, overrides: list[str] | None = None) -> dict:
    p = Path(path)
    if not p.is_file():
        raise ConfigError("config", f"file {str(p)!r} does not exist")
    try:
        cfg = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"not valid JSON ({exc})") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config", "top level must be an object")
    cfg.setdefault("_base_dir", str(p.resolve().parent))
    return apply_overrides(cfg, overrides or [])


def _get(cfg: dict, key: str, default: Any = ...) -> Any:
    node: Any = cfg
    for part in key.split("."):
        if not isinstance(node, dict) or part not in node:
            if default is ...:
                raise ConfigError(key, "required key is missing")
            return default
        node = node[part]
    return node


def _innovation(cfg: dict) -> InnovationSpec:
    desc = _get(cfg, "process.innovation", "rademacher")
    try:
        return InnovationSpec.from_descriptor(desc)
    except (ValueError, KeyError) as exc:
        raise ConfigError("process.innovation", str(exc)) from exc


def _coefficients_descriptor(cfg: dict) -> dict:
    desc = dict(_get(cfg, "process.coefficients"))
    if desc.get("kind") == "csv":
        path = Path(desc["path"])
        if not path.is_absolute():
            path = Path(cfg.get("_base_dir", ".")) / path
        if not path.is_file():
            raise ConfigError("process.coefficients.path", f"file {str(path)!r} does not exist")
        desc["path"] = str(path)
    return desc


def build_process(cfg: dict):
    """``MAProcess`` for ``ma``/``arma``, a chain for ``chain``, a digit process for ``digits``."""
    kind = _get(cfg, "process.kind")
    try:
        if kind == "ma":
            tol = float(_get(cfg, "process.tol", 1e-12))
            return MAProcess(truncate_coefficients(_coefficients_descriptor(cfg), tol), _innovation(cfg))
        if kind == "arma":
            model = ArmaModel(_get(cfg, "process.a", []), _get(cfg, "process.b", []))
            coeffs = arma_to_ma(model, float(_get(cfg, "process.tol", 1e-12)),
                                float(_get(cfg, "process.unit_circle_tol", 1e-8)))
            return MAProcess(coeffs, _innovation(cfg))
        if kind == "chain":
            return make_markov_chain(
                _get(cfg, "process.transition"),
                stationary_init=bool(_get(cfg, "process.stationary_init", True)),
                seed=int(_get(cfg, "seed")),
                values=_get(cfg, "process.values", None),
                initial=_get(cfg, "process.initial", None),
            )
        if kind == "digits":
            return make_digit_process(int(_get(cfg, "seed")), int(_get(cfg, "process.base", 10)),
                                      int(_get(cfg, "process.depth", 17)))
    except ConfigError:
        raise
    except (ModelError, ArgumentError, NumericalError) as exc:
        raise ConfigError("process", str(exc)) from exc
    raise ConfigError("process.kind", f"unknown process kind {kind!r} (expected ma, arma, chain or digits)")


def build_family(cfg: dict) -> SpaceFamily:
    desc = _get(cfg, "family")
    if desc.get("kind", "box") != "box":
        raise ConfigError("family.kind", "only box families are supported")
    try:
        return box_family(int(desc.get("dim", 1)), bool(desc.get("centered", False)))
    except ArgumentError as exc:
        raise ConfigError("family.dim", str(exc)) from exc


def _require_ma(proc, key: str = "process.kind") -> MAProcess:
    if not isinstance(proc, MAProcess):
        raise ConfigError(key, "this experiment needs an ma or arma process")
    return proc


# ---------------------------------------------------------------- experiments


@dataclass
class Outcome:
    result: dict[str, Any]
    columns: list[str]
    rows: list[list[Any]]
    passed: bool
    summary: list[str]
    csv_text: str | None = None


def _fmt(v: Any) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, Fraction):
        return str(v)
    if v is None:
        return ""
    if isinstance(v, (list, tuple, dict)):
        return json.dumps(v, separators=(",", ":"))
    return str(v)


def _csv(columns: list[str], rows: list[list[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _run_clt(cfg: dict, workers: int) -> Outcome:
    proc = build_process(cfg)
    if isinstance(proc, DigitProcess):
        raise ConfigError("process.kind", "the digit process is not centred; use a chain or MA process")
    rep = run_clt_experiment(
        proc, build_family(cfg), _get(cfg, "params.n_grid"), int(_get(cfg, "params.R")),
        int(_get(cfg, "params.k_max", 6)), int(_get(cfg, "seed")), workers, bool(_get(cfg, "params.retry", True)),
    )
    summary = [f"sigma^2 = {rep.sigma2:.6g}"]
    for r in rep.rows:
        ks = "n/a (sigma^2 = 0)" if r.ks is None else f"{r.ks:.4f} (crit {r.ks_critical:.4f})"
        summary.append(f"n={r.n} R={r.R} m2={r.moments[1] if len(r.moments) > 1 else float('nan'):.4f} "
                       f"KS={ks} max|S|={r.max_abs:.4g} attempt={r.attempt} {'pass' if r.passed else 'FAIL'}")
    d = rep.to_dict()
    return Outcome(d, [], [], rep.passed, summary, rep.to_csv())


def _run_moments(cfg: dict, workers: int) -> Outcome:
    proc = _require_ma(build_process(cfg))
    exact = bool(_get(cfg, "params.exact", False))
    method = _get(cfg, "params.method", "moebius")
    tuples = _get(cfg, "params.tuples")
    try:
        engine = MomentEngine(proc.coeffs, proc.innov, exact)
    except ArgumentError as exc:
        raise ConfigError("params.exact", str(exc)) from exc
    reports, rows = [], []
    for i, t in enumerate(tuples):
        tup = [tuple(p) if isinstance(p, list) else p for p in t]
        try:
            rep = engine.mixed_moment(tup, method, int(_get(cfg, "params.cap", 10**7)))
        except ArgumentError as exc:
            raise ConfigError(f"params.tuples.{i}", str(exc)) from exc
        reports.append(rep.to_dict())
        rows.append([t, float(rep.value), str(rep.value) if exact else "", rep.term_count])
    summary = [f"{r[0]}: {r[1]!r} ({r[3]} terms)" for r in rows]
    return Outcome({"moments": reports, "exact": exact}, ["tuple", "value", "exact_value", "term_count"], rows, True, summary)


def _m4_space(cfg: dict):
    w = _get(cfg, "params.window", None)
    if w is not None:
        return make_window(w[0], w[1])
    return space_from_descriptor(_get(cfg, "params.space"))


def _run_verify_m4(cfg: dict, workers: int) -> Outcome:
    proc = _require_ma(build_process(cfg))
    space = _m4_space(cfg)
    a_values = _get(cfg, "params.a_values", list(range(1, 11)))
    sweep = separation_sweep(
        proc.coeffs, proc.innov, space, int(_get(cfg, "params.k_max", 4)), a_values,
        int(_get(cfg, "params.max_tuples", 10**4)), int(_get(cfg, "seed")),
        bool(_get(cfg, "params.exact", False)), keep=True,
    )
    cols = ["tuple", "a", "partition", "lhs", "C_k", "gamma_a", "rhs", "holds"]
    rows = [[list(c.tuple), c.a, c.partition.to_list(), float(c.lhs), c.C_k, c.gamma_a, c.rhs, c.holds]
            for c in sweep.certificates]
    summary = [f"{sweep.checked} certificates over {sweep.tuples} tuples, a in {a_values}",
               f"violations: {len(sweep.violations)}; max lhs/rhs = {sweep.max_ratio:.3g}"]
    return Outcome(sweep.to_dict(), cols, rows, sweep.holds, summary)


def _run_sigma2(cfg: dict, workers: int) -> Outcome:
    proc = _require_ma(build_process(cfg))
    lrv = sigma2(proc.coeffs, build_family(cfg), _get(cfg, "params.n_grid"))
    rows = [[n, v] for n, v in lrv.partials.items()]
    ok = all(v >= -1e-12 for v in lrv.partials.values())
    summary = [f"sigma^2 (closed form) = {lrv.sigma2!r}", f"extrapolated = {lrv.extrapolated!r}"]
    summary += [f"n={n}: {v!r}" for n, v in rows]
    return Outcome(lrv.to_dict(), ["n", "partial"], rows, ok, summary)


def _run_arma_expand(cfg: dict, workers: int) -> Outcome:
    if _get(cfg, "process.kind") != "arma":
        raise ConfigError("process.kind", "arma-expand needs an arma process")
    model = ArmaModel(_get(cfg, "process.a", []), _get(cfg, "process.b", []))
    try:
        reduced = arma_reduce(model, float(_get(cfg, "params.root_tol", 1e-6)))
        coeffs = arma_to_ma(model, float(_get(cfg, "params.tol", _get(cfg, "process.tol", 1e-12))),
                            float(_get(cfg, "process.unit_circle_tol", 1e-8)))
    except (ModelError, ArgumentError, NumericalError) as exc:
        raise ConfigError("process", str(exc)) from exc
    total = float(coeffs.total())
    result = {
        "model": model.descriptor,
        "reduced": {"a": list(reduced.a_coeffs), "b": list(reduced.b_coeffs)},
        "common_roots": [[r.real, r.imag] for r in reduced.common_roots],
        "support": [coeffs.lo[0], coeffs.hi[0]],
        "truncation_error": coeffs.truncation_error,
        "l1_norm": float(coeffs.l1_norm()),
        "sigma2": total * total,
    }
    rows = coeffs.to_rows()
    summary = [f"reduced A_0 coefficients: {list(reduced.a_coeffs)}", f"{len(rows)} coefficients on "
               f"[{coeffs.lo[0]}, {coeffs.hi[0]}], tail <= {coeffs.truncation_error:.3g}", f"sigma^2 = {total * total!r}"]
    return Outcome(result, ["s_1", "c"], rows, True, summary)


def _run_mixing(cfg: dict, workers: int) -> Outcome:
    mode = _get(cfg, "params.mode", "profile")
    if mode == "nonmixing-witness":
        k, d = int(_get(cfg, "params.k", 1)), int(_get(cfg, "params.d", 1))
        base, digit = int(_get(cfg, "params.base", 10)), int(_get(cfg, "params.digit", 5))
        w = nonmixing_witness(k, d, base, digit)
        result = {"mode": mode, "k": k, "d": d, "value": float(w), "exact": str(w)}
        return Outcome(result, ["k", "d", "value", "exact"], [[k, d, float(w), str(w)]], True, [f"{float(w)}"])
    proc = build_process(cfg)
    if not isinstance(proc, MarkovChain):
        raise ConfigError("process.kind", f"mixing mode {mode!r} needs a chain process")
    cap = int(_get(cfg, "params.cap", 12))
    if mode == "profile":
        prof = mixing_profile(proc, _get(cfg, "params.gaps"), int(_get(cfg, "params.width", 1)),
                              int(_get(cfg, "params.start", 1)), cap)
        rows = [[d, a] for d, a in sorted(prof.alphas.items())]
        ok = all(0.0 <= a <= 0.25 + 1e-12 for _, a in rows)
        summary = [f"d={d}: alpha >= {a:.6g}" for d, a in rows] + [f"nonincreasing: {prof.nonincreasing}"]
        return Outcome(prof.to_dict(), ["d", "alpha_window"], rows, ok, summary)
    if mode == "lemma":
        rep = verify_mixing_lemma(proc, _get(cfg, "params.windows"), cap=cap)
        rows = [[rep.windows, rep.lhs, rep.moment_cap, rep.alphas, rep.rhs, rep.holds]]
        return Outcome(rep.to_dict(), ["windows", "lhs", "moment_cap", "alphas", "rhs", "holds"], rows, rep.holds,
                       [f"lhs = {rep.lhs:.6g} <= rhs = {rep.rhs:.6g}: {rep.holds}"])
    raise ConfigError("params.mode", f"unknown mixing mode {mode!r} (profile, lemma, nonmixing-witness)")


def _diagnostics_gamma(cfg: dict) -> Callable[[int], float]:
    if "process" in cfg:
        proc = _require_ma(build_process(cfg))
        return lambda a: float(gamma(proc.coeffs, a))
    g = _get(cfg, "params.gamma")
    if g.get("kind") == "geometric":
        rho = float(g["rho"])
        return lambda a: rho ** (a // 2)
    if g.get("kind") == "polynomial":
        beta = float(g["beta"])
        return lambda a: (1.0 + a // 2) ** -beta
    raise ConfigError("params.gamma.kind", "expected geometric or polynomial")


def _run_diagnostics(cfg: dict, workers: int) -> Outcome:
    fam = build_family(cfg)
    proc = build_process(cfg) if "process" in cfg else None
    diag = condition_diagnostics(
        fam, _diagnostics_gamma(cfg), _get(cfg, "params.k_list", [2, 3]), _get(cfg, "params.ell_list", [2, 3]),
        _get(cfg, "params.n_grid"), proc if isinstance(proc, MAProcess) else None,
        C_max=float(_get(cfg, "params.C_max", 10.0)), band=float(_get(cfg, "params.band", 4.0)),
    )
    rows = [[name, r.verdict] for name, r in diag.results.items()]
    return Outcome(diag.to_dict(), ["condition", "verdict"], rows, True, [f"{n}: {v}" for n, v in rows])


def _run_counting_lemma(cfg: dict, workers: int) -> Outcome:
    rows, reports, ok = [], [], True
    for n in _get(cfg, "params.sizes"):
        space = make_box(1, int(n), centered=False)
        for k in _get(cfg, "params.k_list", [2, 3]):
            for a in _get(cfg, "params.a_list", [0, 1, 2]):
                rep = verify_counting_lemma(space, int(k), int(a), int(_get(cfg, "params.cap", 10**7)))
                reports.append(rep.to_dict())
                ok &= rep.holds
                for r in rep.rows:
                    rows.append([n, k, a, r.partition.to_list(), r.count, r.block_bound, r.coarse_bound, r.holds])
    summary = [f"{len(rows)} (space, k, a, partition) cases; all within both bounds: {ok}"]
    cols = ["size", "k", "a", "partition", "count", "block_bound", "coarse_bound", "holds"]
    return Outcome({"reports": reports, "holds": ok}, cols, rows, ok, summary)


@dataclass(frozen=True)
class Experiment:
    name: str
    description: str
    required: tuple[str, ...]
    runner: Callable[[dict, int], Outcome]


EXPERIMENTS: dict[str, Experiment] = {
    e.name: e
    for e in [
        Experiment("clt", "Monte Carlo moments and KS distance of normalised window sums",
                   ("process", "family", "params.n_grid", "params.R"), _run_clt),
        Experiment("moments", "exact mixed moments of an MA field", ("process", "params.tuples"), _run_moments),
        Experiment("verify-m4", "moment separation certificates over a tuple sweep", ("process",), _run_verify_m4),
        Experiment("sigma2", "long-run variance and finite-n second moments",
                   ("process", "family", "params.n_grid"), _run_sigma2),
        Experiment("arma-expand", "ARMA reduction and MA expansion", ("process",), _run_arma_expand),
        Experiment("mixing", "window alpha-mixing profile, mixing lemma check or the non-mixing digit witness",
                   ("params.mode",), _run_mixing),
        Experiment("diagnostics", "finite-grid evidence for the growth and decay conditions",
                   ("family", "params.n_grid"), _run_diagnostics),
        Experiment("counting-lemma", "exhaustive tuple counts against the counting bounds",
                   ("params.sizes",), _run_counting_lemma),
    ]
}


def list_experiments() -> str:
    lines = []
    for e in EXPERIMENTS.values():
        lines.append(f"{e.name:15s} {e.description}")
        lines.append(f"{'':15s} required: schema_version, seed, experiment, {', '.join(e.required)}")
    return "\n".join(lines)


def validate(cfg: dict) -> list[str]:
    """All problems found in ``cfg``, each prefixed with the offending key; empty when valid."""
    problems: list[str] = []
    if cfg.get("schema_version") != SCHEMA_VERSION:
        problems.append(f"schema_version: expected {SCHEMA_VERSION}, got {cfg.get('schema_version')!r}")
    if "seed" not in cfg:
        problems.append("seed: required key is missing (runs must be reproducible)")
    elif not isinstance(cfg["seed"], int) or isinstance(cfg["seed"], bool):
        problems.append("seed: must be an integer")
    name = cfg.get("experiment")
    exp = EXPERIMENTS.get(name)
    if exp is None:
        problems.append(f"experiment: unknown kind {name!r}; see `momentclt list`")
        return problems
    for key in exp.required:
        try:
            _get(cfg, key)
        except ConfigError as exc:
            problems.append(str(exc))
    if problems:
        return problems
    try:
        if "process" in cfg and not (name == "mixing" and cfg["params"].get("mode") == "nonmixing-witness"):
            build_process(cfg)
        if "family" in cfg:
            build_family(cfg)
        if name == "clt":
            if int(_get(cfg, "params.R")) < 100:
                problems.append("params.R: need at least 100 replications")
            if not 1 <= int(_get(cfg, "params.k_max", 6)) <= 8:
                problems.append("params.k_max: must be in 1..8")
        if name in ("clt", "sigma2", "diagnostics"):
            grid = _get(cfg, "params.n_grid")
            if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
                problems.append("params.n_grid: must be a nonempty increasing list")
    except ConfigError as exc:
        problems.append(str(exc))
    except MomentCLTError as exc:
        problems.append(f"process: {exc}")
    return problems


# ---------------------------------------------------------------- reports


REPORT_KEYS = ("schema_version", "experiment", "seed", "passed", "result", "config", "version")


def check_report(doc: dict) -> list[str]:
    """Problems with an emitted JSON report; empty when it matches the report schema."""
    missing = [k for k in REPORT_KEYS if k not in doc]
    problems = [f"{k}: missing" for k in missing]
    if not missing:
        if doc["schema_version"] != SCHEMA_VERSION:
            problems.append("schema_version: unexpected value")
        if doc["experiment"] not in EXPERIMENTS:
            problems.append("experiment: unknown kind")
        if not isinstance(doc["passed"], bool):
            problems.append("passed: must be boolean")
    return problems


def _json_default(o: Any):
    if isinstance(o, Fraction):
        return str(o)
    if hasattr(o, "tolist"):
        return o.tolist()
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"cannot serialise {type(o).__name__}")


def output_dir(cfg: dict, override: str | None = None) -> Path:
    raw = override or _get(cfg, "output.dir", None) or os.environ.get(OUTPUT_ENV) or DEFAULT_OUTPUT
    p = Path(raw)
    if not p.is_absolute() and override is None and _get(cfg, "output.dir", None):
        p = Path(cfg.get("_base_dir", ".")) / p
    return p


def run_config(cfg: dict, workers: int = 1, out_dir: str | None = None, stream=None) -> tuple[int, dict | None]:
    """Validate and execute ``cfg``; returns the exit code and the JSON report (if any)."""
    stream = stream or sys.stdout
    problems = validate(cfg)
    if problems:
        for p in problems:
            print(f"config error: {p}", file=sys.stderr)
        return EXIT_CONFIG, None
    exp = EXPERIMENTS[cfg["experiment"]]
    workers = int(workers or _get(cfg, "params.workers", 1))
    started = time.perf_counter()
    try:
        outcome = exp.runner(cfg, workers)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG, None
    except SizeError as exc:
        print(f"size error: {exc}", file=sys.stderr)
        return EXIT_SIZE, None
    except (ModelError, ArgumentError, NumericalError) as exc:
        print(f"config error: process: {exc}", file=sys.stderr)
        return EXIT_CONFIG, None
    elapsed = time.perf_counter() - started
    public_cfg = {k: v for k, v in cfg.items() if not k.startswith("_")}
    doc = {
        "schema_version": SCHEMA_VERSION,
        "version": __version__,
        "experiment": exp.name,
        "seed": cfg["seed"],
        "passed": bool(outcome.passed),
        "result": outcome.result,
        "config": public_cfg,
        "wall_clock_seconds": elapsed,
    }
    directory = output_dir(cfg, out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    prefix = _get(cfg, "output.prefix", None) or cfg.get("name") or exp.name
    csv_text = outcome.csv_text if outcome.csv_text is not None else _csv(outcome.columns, outcome.rows)
    (directory / f"{prefix}.csv").write_text(csv_text)
    (directory / f"{prefix}.json").write_text(json.dumps(doc, indent=2, default=_json_default) + "\n")
    print(f"[{exp.name}] seed={cfg['seed']}", file=stream)
    for line in outcome.summary[:20]:
        print(f"  {line}", file=stream)
    if len(outcome.summary) > 20:
        print(f"  ... {len(outcome.summary) - 20} more lines in the report", file=stream)
    print(f"  {'PASS' if outcome.passed else 'FAIL'}; reports in {directory}/{prefix}.{{json,csv}}", file=stream)
    return (EXIT_OK if outcome.passed else EXIT_ASSERTION), doc


# ---------------------------------------------------------------- entry point


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="momentclt", description="Moment-method CLT verification experiments.")
    ap.add_argument("--version", action="version", version=f"momentclt {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run the experiment described by a config file")
    run.add_argument("config")
    run.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                     help="override a dotted config key (repeatable)")
    run.add_argument("--workers", type=int, default=None, help="worker threads; never changes results")
    run.add_argument("--output-dir", default=None, help=f"report directory (default: output.dir, ${OUTPUT_ENV}, "
                     f"or ./{DEFAULT_OUTPUT})")
    val = sub.add_parser("validate", help="check a config file without running it")
    val.add_argument("config")
    val.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    sub.add_parser("list", help="list experiment kinds and their required keys")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "list":
        print(list_experiments())
        return EXIT_OK
    try:
        cfg = load_config(args.config, args.overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "validate":
        problems = validate(cfg)
        for p in problems:
            print(f"config error: {p}")
        if not problems:
            print("ok")
        return EXIT_CONFIG if problems else EXIT_OK
    code, _ = run_config(cfg, args.workers or 0, args.output_dir)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
