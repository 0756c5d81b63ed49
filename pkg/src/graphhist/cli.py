"""Command-line front end.

Every report is JSON with the fully resolved configuration embedded.  Exit
codes: 0 success, 2 invalid input, 3 declared infeasibility, 4 size or part
cap exceeded.  Errors are printed to stderr as JSON diagnostics.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .distributions import PiecewiseDensity, ks_distance, phi_vector, sandwich_radii
from .formats import (read_distribution, read_graph, read_partition, read_pattern, read_type,
                      to_jsonable)
from .graph import SizeCapError, f_degree_distribution, merge_at_root, rooted_copy_counts, subgraph_density_exact
from .maxent import (ConstraintSpec, InfeasibleError, densities_size_bounds, hist_size_bounds,
                     solve_max_entropy)
from .oracle import (CapExceeded, EnumerationScope, counting_lemma_audit, exact_densities_count,
                     exact_hist_count, sandwich_check)
from .szemeredi import KCapExceeded, regular_decompose, type_membership

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_CAP = 0, 2, 3, 4

DEFAULTS = {
    "seed": 0,
    "threads": 1,
    "format": "json",
    "output": None,
    "timing": False,
    "d": 2,
    "n": None,
    "eps": 0.0,
    "starts": 16,
    "k_cap": 64,
    "k_init": 1,
    "mode": "auto",
    "labeling": "labeled",
    "slack": "rigorous",
    "trials": 100,
    "g": 200,
}


class UsageError(ValueError):
    pass


def _floats(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    return [float(x) for x in str(text).split(",") if x.strip()]


def _reference(cfg) -> PiecewiseDensity:
    p = cfg.get("p")
    if p in (None, "uniform"):
        return PiecewiseDensity.uniform()
    return read_distribution(p)


def _family(cfg):
    names = cfg["family"] if isinstance(cfg["family"], list) else str(cfg["family"]).split(",")
    return [read_pattern(x.strip()).graph for x in names]


def _require(cfg, *keys):
    missing = [k for k in keys if cfg.get(k) is None]
    if missing:
        raise UsageError(f"missing required option(s): {', '.join('--' + k.replace('_', '-') for k in missing)}")


def _check_unit(name, x, lo=0.0, hi=1.0):
    if not lo <= x <= hi:
        raise UsageError(f"--{name} must lie in [{lo}, {hi}]")


# ---------------------------------------------------------------- commands


def cmd_fdeg(cfg):
    _require(cfg, "graph", "pattern")
    G = read_graph(cfg["graph"])
    F = read_pattern(cfg["pattern"])
    vec = rooted_copy_counts(G, F, cfg["threads"])
    dist = f_degree_distribution(G, F, cfg["threads"])
    out = {"raw_degrees": list(vec.raw_degrees), "b_max": vec.b_max,
           "distribution": dist.to_json()}
    if cfg.get("p"):
        out["ks_to_reference"] = ks_distance(dist, _reference(cfg))
    return out


def cmd_density(cfg):
    _require(cfg, "graph", "pattern")
    G = read_graph(cfg["graph"])
    H = read_pattern(cfg["pattern"]).graph
    t = subgraph_density_exact(G, H, cfg["threads"])
    return {"density": float(t), "exact": str(t)}


def cmd_radii(cfg):
    _require(cfg, "pattern", "delta")
    p = _reference(cfg)
    F = read_pattern(cfg["pattern"])
    deltas = _floats(cfg["delta"])
    d = int(cfg["d"])
    if d < 1:
        raise UsageError("--d must be positive")
    rows, reports = [], []
    for delta in deltas:
        _check_unit("delta", delta)
        rep = sandwich_radii(p, F, d, delta, cfg.get("n"))
        reports.append(rep.to_json())
        for m in range(d):
            rows.append({"delta": delta, "m": m + 1, "gamma": rep.gamma[m],
                         "slack": rep.slack[m], "beta": rep.beta[m],
                         "beta_feasible": rep.beta_feasible})
    return {"phi": phi_vector(p, F, d).to_json(), "radii": reports, "rows": rows}


def cmd_maxent(cfg):
    _require(cfg, "family", "phi", "gamma", "k")
    spec = ConstraintSpec(_family(cfg), _floats(cfg["phi"]), _floats(cfg["gamma"]),
                          int(cfg["k"]), float(cfg["eps"]))
    sol = solve_max_entropy(spec, starts=int(cfg["starts"]), seed=int(cfg["seed"]))
    return sol.to_json()


def cmd_bounds(cfg):
    target = cfg.get("target")
    if target == "hist":
        _require(cfg, "pattern", "delta", "k")
        delta = float(cfg["delta"])
        _check_unit("delta", delta)
        rep = hist_size_bounds(_reference(cfg), read_pattern(cfg["pattern"]), delta, int(cfg["d"]),
                               int(cfg["k"]), float(cfg["eps"]), cfg.get("n"), int(cfg["seed"]),
                               int(cfg["starts"]))
    else:
        _require(cfg, "family", "phi", "gamma", "k")
        spec = ConstraintSpec(_family(cfg), _floats(cfg["phi"]), _floats(cfg["gamma"]),
                              int(cfg["k"]), float(cfg["eps"]))
        rep = densities_size_bounds(spec, cfg.get("n"), int(cfg["seed"]), int(cfg["starts"]))
    return rep.to_json()


def cmd_szemeredi(cfg):
    _require(cfg, "graph")
    G = read_graph(cfg["graph"])
    eps = float(cfg.get("eps") or 0.0)
    if not 0 < eps <= 1:
        raise UsageError("--eps must lie in (0, 1]")
    if cfg.get("type"):
        S = read_type(cfg["type"])
        part = read_partition(cfg["partition"]) if cfg.get("partition") else None
        return type_membership(G, S, part, mode=cfg["mode"], seed=int(cfg["seed"]))
    P, S, report = regular_decompose(G, eps, int(cfg["k_cap"]), int(cfg["k_init"]),
                                     cfg["mode"], seed=int(cfg["seed"]))
    return {"partition": P.to_json(), "type": S.to_json(), "report": report}


def cmd_oracle(cfg):
    task = cfg.get("task")
    if task in ("count-hist", "count-densities", "sandwich"):
        _require(cfg, "n")
        scope = EnumerationScope(int(cfg["n"]), cfg["labeling"])
    if task == "count-hist":
        _require(cfg, "pattern", "delta")
        p, F = _reference(cfg), read_pattern(cfg["pattern"])
        rows = [{"delta": dl, "count": exact_hist_count(p, F, dl, scope)} for dl in _floats(cfg["delta"])]
        return {"scope": scope.to_json(), "rows": rows, "count": rows[-1]["count"]}
    if task == "count-densities":
        _require(cfg, "family", "phi", "gamma")
        c = exact_densities_count(_floats(cfg["phi"]), _floats(cfg["gamma"]), _family(cfg), scope)
        return {"scope": scope.to_json(), "count": c}
    if task == "sandwich":
        _require(cfg, "pattern", "delta")
        return sandwich_check(_reference(cfg), read_pattern(cfg["pattern"]), float(cfg["delta"]),
                              int(cfg["d"]), scope, cfg["slack"], int(cfg["threads"]),
                              timing=bool(cfg["timing"]))
    if task == "audit":
        _require(cfg, "type", "pattern")
        S = read_type(cfg["type"])
        return counting_lemma_audit(S, read_pattern(cfg["pattern"]).graph, int(cfg["g"]),
                                    int(cfg["trials"]), S.eps, int(cfg["seed"]))
    raise UsageError("oracle task must be count-hist, count-densities, sandwich or audit")


COMMANDS = {
    "fdeg": cmd_fdeg,
    "density": cmd_density,
    "radii": cmd_radii,
    "maxent": cmd_maxent,
    "bounds": cmd_bounds,
    "szemeredi": cmd_szemeredi,
    "oracle": cmd_oracle,
}


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    common = argparse.ArgumentParser(add_help=False, argument_default=S)
    common.add_argument("--config", help="JSON file of option values (flags override)")
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int)
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--format", choices=["json", "csv"])
    common.add_argument("--timing", action="store_true", help="include wall-clock times")

    ap = argparse.ArgumentParser(prog="graphhist", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fdeg", parents=[common], argument_default=S, help="F-degree distribution")
    p.add_argument("--graph")
    p.add_argument("--pattern")
    p.add_argument("--p", help="reference distribution JSON for a KS value")

    p = sub.add_parser("density", parents=[common], argument_default=S, help="subgraph density t(G,H)")
    p.add_argument("--graph")
    p.add_argument("--pattern")

    p = sub.add_parser("radii", parents=[common], argument_default=S, help="outer and inner radii")
    p.add_argument("--p")
    p.add_argument("--pattern")
    p.add_argument("--delta", help="KS radius, or a comma list for a sweep")
    p.add_argument("--d", type=int)
    p.add_argument("--n", type=int, help="graph size for the finite-n slack")

    p = sub.add_parser("maxent", parents=[common], argument_default=S, help="maximum-entropy type")
    p.add_argument("--family", help="comma list of pattern names or files")
    p.add_argument("--phi")
    p.add_argument("--gamma")
    p.add_argument("--k", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--starts", type=int)

    p = sub.add_parser("bounds", parents=[common], argument_default=S, help="size bound reports")
    p.add_argument("target", choices=["hist", "densities"])
    p.add_argument("--p")
    p.add_argument("--pattern")
    p.add_argument("--delta", type=float)
    p.add_argument("--d", type=int)
    p.add_argument("--family")
    p.add_argument("--phi")
    p.add_argument("--gamma")
    p.add_argument("--k", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--starts", type=int)

    p = sub.add_parser("szemeredi", parents=[common], argument_default=S,
                       help="regular decomposition, or membership when --type is given")
    p.add_argument("--graph")
    p.add_argument("--eps", type=float)
    p.add_argument("--k-cap", dest="k_cap", type=int)
    p.add_argument("--k-init", dest="k_init", type=int)
    p.add_argument("--mode", choices=["auto", "exact", "heuristic"])
    p.add_argument("--type")
    p.add_argument("--partition")

    p = sub.add_parser("oracle", parents=[common], argument_default=S, help="exact counts and audits")
    p.add_argument("task", choices=["count-hist", "count-densities", "sandwich", "audit"])
    p.add_argument("--p")
    p.add_argument("--pattern")
    p.add_argument("--delta")
    p.add_argument("--d", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--labeling", choices=["labeled", "unlabeled"])
    p.add_argument("--family")
    p.add_argument("--phi")
    p.add_argument("--gamma")
    p.add_argument("--slack", choices=["rigorous", "constant", "zero"])
    p.add_argument("--type")
    p.add_argument("--g", type=int)
    p.add_argument("--trials", type=int)
    return ap


def resolve(argv) -> dict:
    ns = vars(build_parser().parse_args(argv))
    cfg = dict(DEFAULTS)
    if "config" in ns:
        loaded = json.loads(Path(ns["config"]).read_text())
        if not isinstance(loaded, dict):
            raise UsageError("config file must hold a JSON object")
        cfg.update({k.replace("-", "_"): v for k, v in loaded.items()})
    cfg.update(ns)
    cfg.pop("config", None)
    if "target" in ns:
        cfg["target"] = ns["target"]
    if "task" in ns:
        cfg["task"] = ns["task"]
    if int(cfg["threads"]) < 1:
        raise UsageError("--threads must be positive")
    return cfg


def _emit(report: dict, cfg: dict) -> str:
    if cfg["format"] == "csv":
        rows = report["result"].get("rows") if isinstance(report["result"], dict) else None
        if not rows:
            raise UsageError("csv output is only available for sweeps with tabular rows")
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue()
    return json.dumps(to_jsonable(report), sort_keys=True, indent=2) + "\n"


def _fail(code: int, kind: str, message: str, extra=None) -> int:
    diag = {"error": kind, "message": message, "exit_code": code}
    if extra is not None:
        diag["detail"] = to_jsonable(extra)
    print(json.dumps(diag, sort_keys=True), file=sys.stderr)
    return code


def main(argv=None) -> int:
    try:
        cfg = resolve(argv)
    except SystemExit as exc:  # argparse usage errors
        return EXIT_INVALID if exc.code else EXIT_OK
    except (UsageError, OSError, json.JSONDecodeError) as exc:
        return _fail(EXIT_INVALID, "invalid_input", str(exc))
    np.random.seed(int(cfg["seed"]) % 2**32)
    try:
        result = COMMANDS[cfg["command"]](cfg)
        text = _emit({"command": cfg["command"], "config": cfg, "result": result}, cfg)
    except InfeasibleError as exc:
        return _fail(EXIT_INFEASIBLE, "infeasible", str(exc), exc.best)
    except KCapExceeded as exc:
        return _fail(EXIT_CAP, "cap_exceeded", str(exc), {"partial_partition": exc.partition})
    except (SizeCapError, CapExceeded) as exc:
        return _fail(EXIT_CAP, "cap_exceeded", str(exc))
    except (UsageError, ValueError, KeyError, OSError, TypeError) as exc:
        return _fail(EXIT_INVALID, "invalid_input", str(exc))
    if cfg["output"]:
        Path(cfg["output"]).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
