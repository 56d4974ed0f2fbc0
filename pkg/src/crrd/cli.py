"""Command-line front end.

Parses a problem description (JSON spec file and/or flags; flags win),
dispatches to the closed forms and numerical solvers, and emits the
resulting curve or region as CSV or JSON.  Output is byte-identical for
identical spec and seed: rows follow the sweep order, numbers are printed
with 6 significant digits, files use LF endings and UTF-8, and volatile
data such as wall time goes to stderr only.

Exit codes: 0 success, 2 spec error, 3 infeasible budgets, 4 enumeration
guard exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Any

import numpy as np

from .bruteforce import brute_force_conr, brute_force_hb_nocr, brute_force_wz
from .channels import ConRConstraint
from .closed_form import BinaryMetric, DistortionPair, binary_hb_test_channel, \
    cascade_region_binary, cascade_region_gaussian, rcr_point_binary, \
    rcr_point_gaussian, rhb_cr_binary, rhb_cr_gaussian
from .descent import descent_hb_cr
from .errors import CrrdError, GuardExceededError, InfeasibleBudgetError, \
    InvalidSpecError
from .gridsearch import HB_GUARD_DEFAULT, grid_oracle_hb_cr, grid_oracle_point_cr
from .prob import BinaryErasureSpec, DistortionMetric, FinitePmf, GaussianSpec, \
    JointSource, build_erased_source, check_markov_chain, \
    check_stochastic_degradedness
from .regions import SamplerConfig, cascade_bounds_xy2y1, cascade_region_xy1y2, \
    coop_region_xy1y2, coop_region_xy2y1

__all__ = ["main", "run_command", "emit_csv", "emit_json"]

_SCALAR_COLUMNS = ["sweep_var", "value", "rate_bits", "solver", "flag"]
_REGION_COLUMNS = ["sweep_var", "value", "r1_bits", "r2_bits", "solver", "flag",
                   "provenance"]


def _fmt(v: Any) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def emit_csv(doc: dict, path: str | None) -> None:
    """Write the result table; 6 significant digits, LF endings, UTF-8."""
    lines = [",".join(doc["columns"])]
    for row in doc["rows"]:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def emit_json(doc: dict, path: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _parse_model(text: str) -> dict:
    if ":" not in text:
        raise InvalidSpecError(f"model must look like name:args, got {text!r}")
    name, args = text.split(":", 1)
    name = name.strip().lower().replace("_", "-")
    if name == "custom":
        with open(args, encoding="utf-8") as fh:
            doc = json.load(fh)
        return {"kind": "custom", "doc": doc}
    vals = [float(v) for v in args.split(",") if v.strip() != ""]
    if name in ("gaussian", "g"):
        if len(vals) == 2:
            return {"kind": "gaussian", "sigma_x2": vals[0], "n1": 0.0, "n2": vals[1]}
        if len(vals) == 3:
            return {"kind": "gaussian", "sigma_x2": vals[0], "n1": vals[1], "n2": vals[2]}
        raise InvalidSpecError("gaussian model needs sigma_x2,n or sigma_x2,n1,n2")
    if name in ("binary-erased", "binary", "b"):
        if len(vals) == 1:
            return {"kind": "binary", "p": vals[0]}
        if len(vals) == 2:
            return {"kind": "binary", "p1": vals[0], "p2": vals[1]}
        raise InvalidSpecError("binary model needs p or p1,p2")
    raise InvalidSpecError(f"unknown model {name!r}")


def _metric_from_doc(doc: dict) -> DistortionMetric:
    return DistortionMetric.from_json(json.dumps(doc))


def _binary_metric(name: str) -> BinaryMetric:
    try:
        return BinaryMetric[name.strip().upper()]
    except KeyError as exc:
        raise InvalidSpecError(f"metric must be hamming or erasure, got {name!r}") from exc


def _metric_objects(kind: BinaryMetric) -> DistortionMetric:
    if kind is BinaryMetric.HAMMING:
        return DistortionMetric.hamming(2)
    return DistortionMetric.erasure(2)


def _erased_pair_pmf(p: float) -> FinitePmf:
    mass = np.zeros((2, 3))
    for x in range(2):
        mass[x, x] = 0.5 * (1.0 - p)
        mass[x, 2] = 0.5 * p
    return FinitePmf(mass)


def _sweep_values(spec: dict) -> tuple[str, list[float]]:
    sw = spec.get("sweep")
    if not sw:
        var = "d1"
        return var, [float(spec.get("d1", 0.0))]
    if isinstance(sw, str):
        parts = sw.split(":")
        if len(parts) != 4:
            raise InvalidSpecError("sweep must be var:from:to:count")
        var, lo, hi, count = parts[0], float(parts[1]), float(parts[2]), int(parts[3])
    else:
        var, lo, hi, count = sw["var"], float(sw["from"]), float(sw["to"]), int(sw["count"])
    if count < 1:
        raise InvalidSpecError("sweep count must be >= 1")
    return var, [float(v) for v in np.linspace(lo, hi, count)]


def _budget_pair(spec: dict, var: str, value: float) -> DistortionPair:
    d1 = float(spec.get("d1", 0.0))
    d2 = float(spec.get("d2", 0.0))
    if var == "d1":
        d1 = value
    elif var == "d2":
        d2 = value
    else:
        raise InvalidSpecError(f"unsupported sweep variable {var!r}")
    return DistortionPair(d1, d2)


def _solver_list(spec: dict, allowed: tuple[str, ...], default: str) -> list[str]:
    solver = str(spec.get("solver", default)).lower()
    chosen = ["closed_form", "grid"] if solver == "both" else [solver]
    for s in chosen:
        if s not in allowed:
            raise InvalidSpecError(
                f"solver {s!r} not valid here (allowed: {', '.join(allowed)})")
    return chosen


def _custom_source(model: dict) -> tuple[JointSource, DistortionMetric, DistortionMetric]:
    doc = model["doc"]
    src = JointSource.from_json(json.dumps(doc["source"]))
    m1 = _metric_from_doc(doc["metric1"])
    m2 = _metric_from_doc(doc["metric2"])
    return src, m1, m2


def _finite_instance(spec: dict):
    """(source, metric1, metric2) for grid/descent solvers."""
    model = spec["model"]
    if model["kind"] == "binary":
        if "p1" not in model:
            raise InvalidSpecError("two-decoder problems need binary-erased:p1,p2")
        bspec = BinaryErasureSpec(model["p1"], model["p2"])
        kind = _binary_metric(spec.get("metric", "hamming"))
        met = _metric_objects(kind)
        return build_erased_source(bspec), met, met
    if model["kind"] == "custom":
        return _custom_source(model)
    raise InvalidSpecError("finite-alphabet solver needs a binary-erased or custom model")


def run_point_cr(spec: dict) -> dict:
    model = spec["model"]
    var, values = _sweep_values(spec)
    if var != "d1":
        raise InvalidSpecError("point-cr sweeps d1 only")
    allowed = ("closed_form", "grid")
    rows = []
    solvers = _solver_list(spec, allowed, "closed_form")
    step = float(spec.get("step", 0.01))
    for value in values:
        for solver in solvers:
            if solver == "closed_form":
                if model["kind"] == "gaussian":
                    rate = rcr_point_gaussian(value, model["sigma_x2"],
                                              model["n1"] + model["n2"])
                elif model["kind"] == "binary":
                    p = model.get("p", model.get("p1"))
                    rate = rcr_point_binary(value, p,
                                            _binary_metric(spec.get("metric", "hamming")))
                else:
                    raise InvalidSpecError("closed form needs gaussian or binary model")
            else:
                if model["kind"] == "binary":
                    p = model.get("p", model.get("p1"))
                    pmf = _erased_pair_pmf(p)
                    met = _metric_objects(_binary_metric(spec.get("metric", "hamming")))
                elif model["kind"] == "custom":
                    doc = model["doc"]
                    pmf = FinitePmf(np.asarray(doc["pair_pmf"]["pmf"]).reshape(
                        doc["pair_pmf"]["alphabets"]))
                    met = _metric_from_doc(doc["metric"])
                else:
                    raise InvalidSpecError("grid solver needs a finite-alphabet model")
                rate = grid_oracle_point_cr(pmf, met, value, step)
            rows.append([var, value, rate, solver, ""])
    return _doc("point-cr", spec, _SCALAR_COLUMNS, rows)


def run_hb_cr(spec: dict) -> dict:
    model = spec["model"]
    var, values = _sweep_values(spec)
    solvers = _solver_list(spec, ("closed_form", "grid", "descent"), "closed_form")
    step = float(spec.get("step", 0.02))
    restarts = int(spec.get("restarts", 8))
    seed = int(spec.get("seed", 0))
    rows = []
    for value in values:
        pair = _budget_pair(spec, var, value)
        for solver in solvers:
            flag = ""
            if solver == "closed_form":
                if model["kind"] == "gaussian":
                    gspec = GaussianSpec(model["sigma_x2"], model["n1"], model["n2"])
                    rate, label = rhb_cr_gaussian(pair, gspec)
                elif model["kind"] == "binary" and "p1" in model:
                    bspec = BinaryErasureSpec(model["p1"], model["p2"])
                    rate, label = rhb_cr_binary(
                        pair, bspec, _binary_metric(spec.get("metric", "hamming")))
                else:
                    raise InvalidSpecError("closed form needs gaussian or binary-erased model")
                flag = label.value
            else:
                src, m1, m2 = _finite_instance(spec)
                if solver == "grid":
                    rate, _ = grid_oracle_hb_cr(src, m1, m2, pair, step,
                                                guard=int(spec.get("guard", HB_GUARD_DEFAULT)))
                else:
                    init = None
                    if model["kind"] == "binary" and pair.d2 <= pair.d1 <= 0.5 \
                            and spec.get("metric", "hamming") == "hamming":
                        init = binary_hb_test_channel(
                            pair, BinaryErasureSpec(model["p1"], model["p2"]))
                    rate = descent_hb_cr(src, m1, m2, pair, restarts=restarts,
                                         seed=seed, init=init).rate
            rows.append([var, value, rate, solver, flag])
    return _doc("hb-cr", spec, _SCALAR_COLUMNS, rows)


def _region_rows(region, solver: str) -> list[list]:
    rows = []
    for i, p in enumerate(region.points):
        rows.append(["boundary", float(i), p.r1, p.r2, solver, "", p.provenance])
    return rows


def _sampler_config(spec: dict) -> SamplerConfig:
    method = "grid" if str(spec.get("solver", "grid")).lower() == "grid" else "scalarize"
    return SamplerConfig(
        method=method,
        step=float(spec.get("step", 0.1)),
        n_weights=int(spec.get("weights", 11)),
        restarts=int(spec.get("restarts", 4)),
        seed=int(spec.get("seed", 0)),
    )


def run_coop_cr(spec: dict) -> dict:
    src, m1, m2 = _finite_instance(spec)
    chain = str(spec.get("chain", "")).lower()
    if not chain:
        if check_markov_chain(src, "x-y1-y2"):
            chain = "x-y1-y2"
        elif check_markov_chain(src, "x-y2-y1"):
            chain = "x-y2-y1"
        else:
            raise InvalidSpecError("source satisfies neither Markov chain; pass --chain")
    var, values = _sweep_values(spec)
    cfg = _sampler_config(spec)
    rows = []
    meta: dict[str, Any] = {}
    for value in values:
        pair = _budget_pair(spec, var, value)
        if chain == "x-y1-y2":
            region = coop_region_xy1y2(src, m1, m2, pair, cfg)
        else:
            region = coop_region_xy2y1(src, m1, m2, pair, cfg)
            meta["unbounded"] = list(region.unbounded)
        rows.extend(_region_rows(region, cfg.method))
    doc = _doc("coop-cr", spec, _REGION_COLUMNS, rows)
    doc["meta"].update(meta)
    doc["meta"]["chain"] = chain
    return doc


def run_cascade_cr(spec: dict) -> dict:
    model = spec["model"]
    var, values = _sweep_values(spec)
    solvers = _solver_list(spec, ("closed_form", "grid", "descent"), "closed_form")
    rows = []
    meta: dict[str, Any] = {}
    for value in values:
        pair = _budget_pair(spec, var, value)
        for solver in solvers:
            if solver == "closed_form":
                if model["kind"] == "gaussian":
                    gspec = GaussianSpec(model["sigma_x2"], model["n1"], model["n2"])
                    r1, r2 = cascade_region_gaussian(pair, gspec)
                    meta["inner_outer"] = "coincident"
                elif model["kind"] == "binary" and "p1" in model:
                    bspec = BinaryErasureSpec(model["p1"], model["p2"])
                    r1, r2 = cascade_region_binary(pair, bspec)
                    meta["inner_outer"] = "coincident"
                else:
                    raise InvalidSpecError("closed form needs gaussian or binary-erased model")
                rows.append(["corner", value, r1, r2, solver, "", "outer-corner"])
            else:
                src, m1, m2 = _finite_instance(spec)
                cfg = _sampler_config(spec)
                chain = str(spec.get("chain", "")).lower()
                if not chain:
                    chain = "x-y2-y1" if check_markov_chain(src, "x-y2-y1") else "x-y1-y2"
                if chain == "x-y1-y2":
                    region = cascade_region_xy1y2(src, m1, m2, pair, cfg)
                    rows.extend(_region_rows(region, solver))
                else:
                    seeds = ()
                    if model["kind"] == "binary" and pair.d2 <= pair.d1 <= 0.5 \
                            and spec.get("metric", "hamming") == "hamming":
                        seeds = (binary_hb_test_channel(
                            pair, BinaryErasureSpec(model["p1"], model["p2"])),)
                    cfg = SamplerConfig(method=cfg.method, step=cfg.step,
                                        n_weights=cfg.n_weights, restarts=cfg.restarts,
                                        seed=cfg.seed, seed_channels=seeds)
                    bounds = cascade_bounds_xy2y1(src, m1, m2, pair, cfg)
                    oc = bounds.outer.points[0]
                    rows.append(["corner", value, oc.r1, oc.r2, solver, "", "outer-corner"])
                    rows.extend([["boundary", float(i), p.r1, p.r2, solver, "", "inner"]
                                 for i, p in enumerate(bounds.inner.points)])
                    meta["gap_bits"] = bounds.gap
    doc = _doc("cascade-cr", spec, _REGION_COLUMNS, rows)
    doc["meta"].update(meta)
    return doc


def run_conr(spec: dict) -> dict:
    src, m1, m2 = _finite_instance(spec)
    var, values = _sweep_values(spec)
    step = float(spec.get("step", 0.05))
    caps = (int(spec.get("u1_cap", 2)), int(spec.get("u2_cap", 2)))
    de1 = float(spec.get("de1", 0.0))
    de2 = float(spec.get("de2", 0.0))
    conr = ConRConstraint(de1, de2,
                          DistortionMetric.hamming(m1.n_outputs),
                          DistortionMetric.hamming(m2.n_outputs))
    exact_caps = (src.nx + 4, (src.nx + 2) ** 2)
    rows = []
    heuristic_seen = False
    for value in values:
        pair = _budget_pair(spec, var, value)
        res = brute_force_conr(src, m1, m2, pair, conr, u_caps=caps, step=step,
                               map_budget=int(spec.get("map_budget", 1_000_000)))
        flags = []
        if res.heuristic:
            flags.append("heuristic")
        if caps[0] < exact_caps[0] or caps[1] < exact_caps[1]:
            flags.append("caps_reduced")
        heuristic_seen = heuristic_seen or res.heuristic
        rows.append([var, value, res.rate, "brute_force", ",".join(flags)])
    doc = _doc("conr", spec, _SCALAR_COLUMNS, rows)
    doc["meta"]["u_caps"] = list(caps)
    doc["meta"]["exact_caps"] = list(exact_caps)
    doc["meta"]["de"] = [de1, de2]
    return doc


def run_hb_nocr(spec: dict) -> dict:
    src, m1, m2 = _finite_instance(spec)
    var, values = _sweep_values(spec)
    step = float(spec.get("step", 0.05))
    caps = (int(spec.get("u1_cap", 2)), int(spec.get("u2_cap", 2)))
    rows = []
    for value in values:
        pair = _budget_pair(spec, var, value)
        rate = brute_force_hb_nocr(src, m1, m2, pair, u_caps=caps, step=step)
        rows.append([var, value, rate, "brute_force", ""])
    doc = _doc("hb-nocr", spec, _SCALAR_COLUMNS, rows)
    doc["meta"]["u_caps"] = list(caps)
    return doc


def run_wz(spec: dict) -> dict:
    model = spec["model"]
    var, values = _sweep_values(spec)
    if var != "d1":
        raise InvalidSpecError("wz sweeps d1 only")
    step = float(spec.get("step", 0.05))
    cap = int(spec.get("u_cap", 3))
    if model["kind"] == "binary":
        p = model.get("p", model.get("p1"))
        pmf = _erased_pair_pmf(p)
        met = _metric_objects(_binary_metric(spec.get("metric", "hamming")))
    elif model["kind"] == "custom":
        doc = model["doc"]
        pmf = FinitePmf(np.asarray(doc["pair_pmf"]["pmf"]).reshape(
            doc["pair_pmf"]["alphabets"]))
        met = _metric_from_doc(doc["metric"])
    else:
        raise InvalidSpecError("wz needs a finite-alphabet model")
    rows = []
    for value in values:
        rate = brute_force_wz(pmf, met, value, cap, step)
        rows.append([var, value, rate, "brute_force", ""])
    return _doc("wz", spec, _SCALAR_COLUMNS, rows)


def run_degradedness(spec: dict) -> dict:
    model = spec["model"]
    if model["kind"] == "binary" and "p1" in model:
        src = build_erased_source(BinaryErasureSpec(model["p1"], model["p2"]))
    elif model["kind"] == "custom":
        src = JointSource.from_json(json.dumps(model["doc"]["source"]))
    else:
        raise InvalidSpecError("degradedness needs a binary-erased or custom model")
    res = check_stochastic_degradedness(src)
    rows = [["verdict", 1.0 if res.feasible else 0.0, res.violation,
             "linear_program", "feasible" if res.feasible else "infeasible"]]
    doc = _doc("degradedness", spec, _SCALAR_COLUMNS, rows)
    doc["meta"]["kernel"] = [[float(v) for v in row] for row in res.kernel]
    doc["meta"]["violation_tv"] = res.violation
    return doc


def run_figure(spec: dict) -> dict:
    fid = int(spec.get("id", 0))
    if fid == 6:
        gspec = GaussianSpec(4.0, 2.0, 3.0)
        d1_values = [round(0.1 * i, 10) for i in range(1, 61)]
        rows = []
        for d2 in (0.5, 1.0, 2.5, 5.0):
            for d1 in d1_values:
                rate, label = rhb_cr_gaussian(DistortionPair(d1, d2), gspec)
                rows.append([d2, d1, rate, label.value, "closed_form", ""])
        doc = _doc("figure-6", spec,
                   ["d2", "d1", "rate_bits", "region", "solver", "flag"], rows)
        doc["meta"]["model"] = {"kind": "gaussian", "sigma_x2": 4.0, "n1": 2.0, "n2": 3.0}
        return doc
    if fid == 8:
        bspec = BinaryErasureSpec(1.0, 0.35)
        src = build_erased_source(bspec)
        met = DistortionMetric.hamming(2)
        step = float(spec.get("step", 0.05))
        caps = (int(spec.get("u1_cap", 2)), int(spec.get("u2_cap", 2)))
        d1_values = [0.05, 0.1, 0.2, 0.35, 0.5]
        rows = []
        for d2 in (0.05, 0.3):
            for d1 in d1_values:
                pair = DistortionPair(d1, d2)
                cr = rhb_cr_binary(pair, bspec, BinaryMetric.HAMMING).rate
                nocr = brute_force_hb_nocr(src, met, met, pair, u_caps=caps, step=step)
                rows.append([d2, d1, cr, nocr, "closed_form+brute_force", ""])
        doc = _doc("figure-8", spec,
                   ["d2", "d1", "rate_cr_bits", "rate_nocr_bits", "solver", "flag"],
                   rows)
        doc["meta"]["model"] = {"kind": "binary", "p1": 1.0, "p2": 0.35}
        doc["meta"]["u_caps"] = list(caps)
        doc["meta"]["step"] = step
        return doc
    raise InvalidSpecError("figure id must be 6 or 8")


_RUNNERS = {
    "point-cr": run_point_cr,
    "hb-cr": run_hb_cr,
    "coop-cr": run_coop_cr,
    "cascade-cr": run_cascade_cr,
    "conr": run_conr,
    "hb-nocr": run_hb_nocr,
    "wz": run_wz,
    "degradedness": run_degradedness,
    "figure": run_figure,
}


def _doc(command: str, spec: dict, columns: list[str], rows: list[list]) -> dict:
    echo = {k: v for k, v in spec.items() if k != "model" or not isinstance(v, dict)
            or v.get("kind") != "custom"}
    if isinstance(spec.get("model"), dict) and spec["model"].get("kind") == "custom":
        echo["model"] = {"kind": "custom"}
    return {
        "command": command,
        "spec": echo,
        "columns": columns,
        "rows": rows,
        "meta": {
            "solver": spec.get("solver"),
            "step": spec.get("step"),
            "restarts": spec.get("restarts"),
            "seed": spec.get("seed"),
        },
    }


def run_command(command: str, spec: dict) -> dict:
    """Resolve and execute one subcommand; returns the result document."""
    if command not in _RUNNERS:
        raise InvalidSpecError(f"unknown command {command!r}")
    return _RUNNERS[command](spec)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crrd",
        description="Rate-distortion curves and regions for multiterminal "
                    "source coding with common-reconstruction constraints.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _RUNNERS:
        p = sub.add_parser(name)
        p.add_argument("--spec", help="JSON spec file; flags override its fields")
        p.add_argument("--model", help="gaussian:s2,n1,n2 | binary-erased:p1,p2 | custom:FILE")
        p.add_argument("--d1", type=float)
        p.add_argument("--d2", type=float)
        p.add_argument("--de1", type=float)
        p.add_argument("--de2", type=float)
        p.add_argument("--sweep", help="var:from:to:count")
        p.add_argument("--solver", help="closed_form | grid | descent | both")
        p.add_argument("--metric", help="hamming | erasure")
        p.add_argument("--chain", help="x-y1-y2 | x-y2-y1")
        p.add_argument("--step", type=float)
        p.add_argument("--restarts", type=int)
        p.add_argument("--weights", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--u-cap", dest="u_cap", type=int)
        p.add_argument("--u1-cap", dest="u1_cap", type=int)
        p.add_argument("--u2-cap", dest="u2_cap", type=int)
        p.add_argument("--map-budget", dest="map_budget", type=int)
        p.add_argument("--guard", type=int)
        p.add_argument("--id", type=int, help="figure id (6 or 8)")
        p.add_argument("--out", help="output file (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=None)
    return parser


def _resolve_spec(ns: argparse.Namespace) -> dict:
    spec: dict[str, Any] = {}
    if ns.spec:
        with open(ns.spec, encoding="utf-8") as fh:
            spec.update(json.load(fh))
    for key in ("model", "d1", "d2", "de1", "de2", "sweep", "solver", "metric",
                "chain", "step", "restarts", "weights", "seed", "u_cap",
                "u1_cap", "u2_cap", "map_budget", "guard", "id", "format"):
        val = getattr(ns, key, None)
        if val is not None:
            spec[key] = val
    if isinstance(spec.get("model"), str):
        spec["model"] = _parse_model(spec["model"])
    return spec


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    ns = parser.parse_args(argv)
    try:
        spec = _resolve_spec(ns)
        t0 = time.time()
        doc = run_command(ns.command, spec)
        wall = time.time() - t0
        fmt = spec.get("format") or "csv"
        if fmt == "csv":
            emit_csv(doc, ns.out)
        else:
            emit_json(doc, ns.out)
        print(f"crrd {ns.command}: {len(doc['rows'])} rows in {wall:.2f}s",
              file=sys.stderr)
        return 0
    except InfeasibleBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except GuardExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (InvalidSpecError, CrrdError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
