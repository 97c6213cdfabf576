"""Command-line entry point: ``securenc <command> [options]``.

Every command writes one JSON (default) or text report that embeds the
full run configuration and the package version. Exit status is 0 on
success, 1 for a negative verdict (audit failure, infeasible plan,
exhausted search, non-universal family) and 2 for usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import InfeasibleError, SearchExhaustedError, SecureNCError
from .gf import FieldSpec, Matrix, enumerate_subspaces, gf, mat_kernel
from .hashcheck import FROBENIUS, FULL_GL, HashFamily, frobenius_family, orbit_collision_prob, verify_two_universal
from .infoprob import MessageDist
from .netcode import Precoder, Scenario
from .secbounds import (
    PlannerInput,
    asymptotic_rate,
    avg_leak_bound,
    grassmann_count,
    log_union_factor,
    mp,
    plan_block_length,
    plan_over_rho,
    planner_log_bound,
    realization_bound_ub5,
    realization_bound_ub7,
    search_precoder,
    strong_security_audit,
    success_prob,
    total_classes_bound,
)

COMMANDS = ("plan", "audit", "search", "count-classes", "verify-hash", "bounds")

PRESETS = {
    "paper-3.4": {
        "command": "plan", "q": 256, "n": 10, "mu": 3, "T": 5, "rate": [2.0] * 5,
        "delta": 0.5, "rho": 0.5, "eps_leak": 1e-6, "eps_fail": 1e-12,
    },
    "tiny-audit": {
        "command": "audit",
        "scenario": {"field": "GF(2^1)/poly=2", "m": 1, "n": 2, "T": 2, "k": [1, 1, 0]},
        "dist": {"form": "uniform"},
        "precoder": [[1, 1], [0, 1]],
        "leak_tol": 0.0,
    },
    "desk-search": {
        "command": "search",
        "scenario": {"field": "GF(2^2)/poly=7", "m": 1, "n": 3, "T": 2, "k": [1, 1, 1]},
        "dist": {"form": "uniform"},
        "leak_tol": 0.0, "budget": 500, "seed": 0,
    },
}


class UsageError(Exception):
    """Bad input detected after argument parsing; maps to exit status 2."""


def _big(x) -> str:
    return mp.nstr(x, 17)


# ---------------------------------------------------------------------------
# Report schemas, used by the tests to check every emitted document.
# ---------------------------------------------------------------------------

_ENVELOPE = {
    "type": "object",
    "required": ["command", "version", "config", "result", "status"],
    "properties": {
        "command": {"enum": list(COMMANDS)},
        "version": {"type": "string"},
        "config": {"type": "object"},
        "status": {"enum": ["ok", "fail"]},
        "result": {"type": "object"},
    },
}

RESULT_SCHEMAS = {
    "plan": {
        "type": "object",
        "required": ["feasible"],
        "properties": {
            "feasible": {"type": "boolean"},
            "m": {"type": "integer", "minimum": 1},
            "m_real": {"type": "number"},
            "C1": {"type": "string"},
            "log_C1": {"type": "number"},
            "precoder_dim": {"type": "array", "items": {"type": "integer"}},
            "success_prob": {"type": "string"},
            "bounds": {"type": "object"},
        },
    },
    "audit": {
        "type": "object",
        "required": ["pass", "max_leakage", "entries", "target_eta"],
        "properties": {
            "pass": {"type": "boolean"},
            "max_leakage": {"type": "number", "minimum": 0},
            "eta_universal": {"type": ["number", "null"]},
            "entries": {"type": "array", "items": {
                "type": "object",
                "required": ["mu", "I", "leakage", "secure"],
            }},
        },
    },
    "search": {
        "type": "object",
        "required": ["found", "draws"],
        "properties": {"found": {"type": "boolean"}, "draws": {"type": "integer"}},
    },
    "count-classes": {
        "type": "object",
        "required": ["per_mu", "exact_total", "bound"],
        "properties": {"exact_total": {"type": "integer"}, "per_mu": {"type": "array"}},
    },
    "verify-hash": {
        "type": "object",
        "required": ["instances", "all_pass"],
        "properties": {
            "all_pass": {"type": "boolean"},
            "instances": {"type": "array", "items": {
                "type": "object",
                "required": ["B", "max_collision", "threshold", "pass", "pairs_checked"],
            }},
        },
    },
    "bounds": {
        "type": "object",
        "required": ["avg_leak", "ub5", "ub7_per_symbol", "min_total"],
    },
}


def report_schema(command: str) -> dict:
    schema = json.loads(json.dumps(_ENVELOPE))
    schema["properties"]["command"] = {"const": command}
    schema["properties"]["result"] = RESULT_SCHEMAS[command]
    return schema


# ---------------------------------------------------------------------------
# Input helpers
# ---------------------------------------------------------------------------

def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise UsageError(f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from None


def _scenario(cfg) -> Scenario:
    if cfg.get("scenario") is None:
        raise UsageError("--scenario is required")
    return Scenario.from_json(cfg["scenario"])


def _dist(cfg, sc: Scenario) -> MessageDist:
    return MessageDist.from_json(sc, cfg.get("dist") or {"form": "uniform"})


def _precoder(cfg, sc: Scenario) -> Precoder:
    rows = cfg.get("precoder")
    if rows is None:
        return Precoder.random(sc, np.random.default_rng(cfg.get("seed", 0)))
    return Precoder(sc, Matrix.from_json(sc.field, rows))


def _mus(cfg, n):
    top = cfg.get("max_mu")
    return tuple(range(n + 1 if top is None else min(top, n) + 1))


def _planner_input(cfg) -> PlannerInput:
    missing = [k for k in ("q", "n", "T", "mu", "rate", "delta") if cfg.get(k) is None]
    if missing:
        raise UsageError("missing planner parameters: " + ", ".join("--" + k for k in missing))
    rate = cfg["rate"]
    if len(rate) == 1:
        rate = rate * cfg["T"]
    return PlannerInput(cfg["q"], cfg["n"], cfg["T"], cfg["mu"], tuple(rate), cfg["delta"],
                        cfg.get("rho") or 0.5, cfg.get("eps_leak") or 1e-6, cfg.get("eps_fail") or 1e-12)


# ---------------------------------------------------------------------------
# Commands; each returns (ok, result dict, text lines)
# ---------------------------------------------------------------------------

def cmd_plan(cfg):
    p = _planner_input(cfg)
    try:
        rep = plan_over_rho(p) if cfg.get("rho_grid") else plan_block_length(p)
    except InfeasibleError as exc:
        res = {"feasible": False, "reason": str(exc)}
        return False, res, [f"infeasible: {exc}"]
    res = rep.to_json()
    res["feasible"] = True
    p = rep.inputs
    r = max(p.rates)
    log_E = -p.rho * rep.m * (p.n - r - p.delta_rho) * mp.log(p.q)
    ub5 = realization_bound_ub5(log_C1=rep.log_C1, rho=p.rho, q=p.q, m=rep.m, mu=p.mu, log_power_sum=log_E)
    ub7 = realization_bound_ub7(log_C1=rep.log_C1, rho=p.rho, q=p.q, m=rep.m, mu=p.mu, log_power_sum=log_E)
    res["bounds"] = {"ub5": _big(ub5), "ub7_per_symbol": _big(ub7),
                     "min_total": _big(min(ub5, rep.m * ub7))}
    text = [
        f"C1            {_big(rep.C1)}",
        f"m_real        {float(rep.m_real):.6f}",
        f"m             {rep.m}",
        f"precoder      {rep.precoder_dim} x {rep.precoder_dim}",
        f"bound at m    {res['bound_at_m']} nats",
        f"success prob  {res['success_prob']}",
    ]
    return True, res, text


def cmd_audit(cfg):
    sc = _scenario(cfg)
    dist = _dist(cfg, sc)
    pre = _precoder(cfg, sc)
    rep = strong_security_audit(sc, dist, pre, cfg.get("leak_tol") or 0.0, mus=_mus(cfg, sc.n),
                                target_eta=cfg.get("target_eta"))
    return rep.passed, rep.to_json(), rep.to_text().splitlines()


def cmd_search(cfg):
    sc = _scenario(cfg)
    dist = _dist(cfg, sc)
    tol = cfg.get("leak_tol") or 0.0
    budget = cfg.get("budget")
    budget = 500 if budget is None else budget
    try:
        found = search_precoder(sc, dist, tol, budget, np.random.default_rng(cfg.get("seed", 0)),
                                mus=_mus(cfg, sc.n), target_eta=cfg.get("target_eta"))
    except SearchExhaustedError as exc:
        return False, {"found": False, "draws": budget}, [f"search failed: {exc}"]
    res = {"found": True, "draws": found.draws, "audit": found.report.to_json()}
    return True, res, [f"found after {found.draws} draws"] + found.report.to_text().splitlines()


def cmd_count_classes(cfg):
    q, n = cfg.get("q"), cfg.get("n")
    if q is None or n is None:
        raise UsageError("--q and --n are required")
    per = []
    for mu in range(1, n + 1):
        g = grassmann_count(q, n, mu)
        per.append({"mu": mu, "exact": g.exact, "lower": g.lower, "upper_product": g.upper_product,
                    "upper_power": g.upper_power, "upper_uniform": _big(g.upper_uniform)})
    tot = total_classes_bound(q, n)
    res = {"per_mu": per, "exact_total": tot.exact, "bound": _big(tot.bound)}
    text = [f"{'mu':>3} {'exact':>12} {'lower':>12} {'upper':>12}"]
    text += [f"{e['mu']:>3} {e['exact']:>12} {e['lower']:>12} {e['upper_power']:>12}" for e in per]
    text.append(f"total {tot.exact} <= {_big(tot.bound)}")
    return True, res, text


def _all_wiretaps(spec: FieldSpec, mn: int):
    yield Matrix.zeros(spec, 0, mn)
    for r in range(1, mn):
        for K in enumerate_subspaces(spec, mn, mn - r):
            yield mat_kernel(K.basis).basis
    yield Matrix.identity(spec, mn)


def cmd_verify_hash(cfg):
    q, mn = cfg.get("q"), cfg.get("mn")
    if q is None or mn is None:
        raise UsageError("--q and --mn are required")
    spec = gf(q)
    kind = cfg.get("kind") or FULL_GL
    if cfg.get("B") is not None:
        Bs = [Matrix.from_json(spec, cfg["B"])]
    else:
        Bs = list(_all_wiretaps(spec, mn))
    out = []
    for B in Bs:
        fam = HashFamily.full_gl(spec, B) if kind == FULL_GL else frobenius_family(spec, mn, B)
        rep = verify_two_universal(fam).to_json()
        orbit = orbit_collision_prob(kind, spec, mn, B)
        rep["B"] = B.to_json()
        rep["orbit_pass"] = orbit.passed
        rep["orbit_max_ratio"] = str(orbit.max_ratio)
        out.append(rep)
    ok = all(r["pass"] and r["orbit_pass"] for r in out)
    text = [f"{str(r['B']):<28} {r['max_collision']:>8} <= {r['threshold']:<6} {r['pass']}" for r in out]
    return ok, {"kind": kind, "instances": out, "all_pass": ok}, text


def cmd_bounds(cfg):
    p = _planner_input(cfg)
    m = cfg.get("m")
    if m is None:
        raise UsageError("--m is required")
    r = max(p.rates)
    if cfg.get("log_power_sum") is not None:
        log_E = mp.mpf(cfg["log_power_sum"])
    else:
        log_E = -p.rho * m * (p.n - r - p.delta_rho) * mp.log(p.q)
    if cfg.get("C1") is not None:
        log_C1 = mp.log(cfg["C1"])
    else:
        log_C1 = log_union_factor(p.T, p.n, p.q) - mp.log(p.eps_fail)
    avg = avg_leak_bound(p.rho, p.q, m, p.mu, log_power_sum=log_E)
    ub5 = realization_bound_ub5(log_C1=log_C1, rho=p.rho, q=p.q, m=m, mu=p.mu, log_power_sum=log_E)
    ub7 = realization_bound_ub7(log_C1=log_C1, rho=p.rho, q=p.q, m=m, mu=p.mu, log_power_sum=log_E)
    rate = asymptotic_rate(p.q, p.n, p.mu, r, p.delta_rho)
    sp = success_prob(log_C1=log_C1, T=p.T, n=p.n, q=p.q)
    res = {
        "m": m, "log_power_sum": float(log_E), "C1": _big(mp.exp(log_C1)),
        "avg_leak": _big(avg), "ub5": _big(ub5), "ub7_per_symbol": _big(ub7),
        "min_total": _big(min(ub5, m * ub7)),
        "asymptotic_rate": {"raw": rate.raw, "clamped": rate.clamped},
        "success_prob": {"value": _big(sp.value), "useful": sp.useful},
        "planner_bound": _big(mp.exp(planner_log_bound(p, m, log_C1))),
    }
    text = [f"{k:<16} {v}" for k, v in res.items()]
    return True, res, text


HANDLERS = {
    "plan": cmd_plan, "audit": cmd_audit, "search": cmd_search,
    "count-classes": cmd_count_classes, "verify-hash": cmd_verify_hash, "bounds": cmd_bounds,
}


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="securenc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"securenc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--preset", help="named parameter set; explicit flags override it")
        sp.add_argument("--scenario", help="scenario JSON file")
        sp.add_argument("--dist", help="message distribution JSON file (default: uniform)")
        sp.add_argument("--precoder", help="precoder matrix JSON file (rows of field codes)")
        sp.add_argument("--B", dest="B", help="wiretap matrix JSON file (verify-hash)")
        sp.add_argument("--q", type=int)
        sp.add_argument("--n", type=int)
        sp.add_argument("--m", type=int)
        sp.add_argument("--mn", type=int)
        sp.add_argument("--mu", type=int)
        sp.add_argument("--T", dest="T", type=int)
        sp.add_argument("--rate", type=float, nargs="+", help="k_i/m per message (one value repeats)")
        sp.add_argument("--delta", type=float, help="delta_rho")
        sp.add_argument("--rho", type=float)
        sp.add_argument("--rho-grid", action="store_true", help="plan over rho = 0.1..1.0")
        sp.add_argument("--C1", dest="C1", type=float)
        sp.add_argument("--log-power-sum", type=float)
        sp.add_argument("--eps-leak", type=float)
        sp.add_argument("--eps-fail", type=float)
        sp.add_argument("--leak-tol", type=float)
        sp.add_argument("--target-eta", type=float)
        sp.add_argument("--max-mu", type=int)
        sp.add_argument("--kind", choices=[FULL_GL, FROBENIUS])
        sp.add_argument("--budget", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--format", choices=["json", "text"], default="json")
    return parser


_FILE_KEYS = ("scenario", "dist", "precoder", "B")
_NON_CONFIG = ("command", "preset", "out", "format")


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge preset values, flag values and referenced JSON files into one dict."""
    cfg = {}
    if args.preset is not None:
        if args.preset not in PRESETS:
            raise UsageError(f"unknown preset {args.preset!r}; available: {', '.join(sorted(PRESETS))}")
        preset = dict(PRESETS[args.preset])
        preset.pop("command")  # the command the preset was written for; others may reuse it
        cfg.update(preset)
    for key, value in vars(args).items():
        if key in _NON_CONFIG or value is None or value is False:
            continue
        cfg[key] = _load_json(value) if key in _FILE_KEYS else value
    return cfg


def run(command: str, cfg: dict) -> tuple[int, dict, list[str]]:
    """Execute ``command`` on a resolved config; returns ``(status, report, text)``."""
    ok, result, text = HANDLERS[command](cfg)
    report = {
        "command": command,
        "version": __version__,
        "config": cfg,
        "status": "ok" if ok else "fail",
        "result": result,
    }
    return (0 if ok else 1), report, text


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        status, report, text = run(args.command, cfg)
    except UsageError as exc:
        print(f"securenc: error: {exc}", file=sys.stderr)
        return 2
    except (SecureNCError, ValueError, KeyError, TypeError) as exc:
        print(f"securenc: error: {exc}", file=sys.stderr)
        return 2
    body = dumps(report) if args.format == "json" else "\n".join(text) + "\n"
    if args.out:
        Path(args.out).write_text(body)
    else:
        sys.stdout.write(body)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
