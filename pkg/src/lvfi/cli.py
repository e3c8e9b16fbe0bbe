"""Command-line front end.

Subcommands: detect, verify, oracle, sweep, catalog.  Exit-code contract:
0 success/found, 1 input error, 2 internal/domain error, 3 clean negative
(no detection, nonzero residual, failed sweep samples).
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction

from . import expr as ex
from .catalog2d import RULES_2D, SAMPLERS_2D, detect2d_full
from .catalog3d import RULES_3D, SAMPLERS_3D, detect3d_full
from .model import ModelError, parse_system
from .oracle import AnsatzError, AnsatzSpec, residual_2d, residual_3d, residual_dump
from .verify import (
    DomainViolation,
    conservation_report,
    integrate,
    lie_check,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INTERNAL = 2
EXIT_NEGATIVE = 3


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _frac(text: str) -> Fraction:
    return Fraction(text)


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=None, help="RNG seed (default: LVFI_SEED or 42)")
    p.add_argument("--points", type=int, default=50, help="Lie-check sample count")
    p.add_argument("--region", default="0.1,10", help="sampling box lo,hi per axis")
    p.add_argument("--t-end", type=float, default=10.0, dest="t_end")
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--method", choices=("rk4", "rk45"), default="rk4")
    p.add_argument("--tol-lie", type=float, default=1e-10, dest="tol_lie")
    p.add_argument("--tol-drift", type=float, default=1e-6, dest="tol_drift")
    p.add_argument("--format", choices=("pretty", "json"), default="pretty")


def _seed_of(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("LVFI_SEED")
    return int(env) if env else 42


def _region_of(args) -> tuple[float, float]:
    lo, _, hi = args.region.partition(",")
    lo, hi = float(lo), float(hi)
    if not lo < hi:
        raise ValueError(f"bad region {args.region!r}")
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lvfi",
        description="Detect and verify first integrals of 2D/3D Lotka-Volterra "
        "systems with constant terms.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="detect first integrals of a system")
    p.add_argument("--input", required=True, help="system JSON path or - for stdin")
    p.add_argument("--no-verify", action="store_true", help="skip numerical verification")
    p.add_argument("--x0", default=None, help="initial point for conservation, comma separated")
    _add_common(p)

    p = sub.add_parser("verify", help="verify a given integral against a system")
    p.add_argument("--input", required=True)
    p.add_argument("--integral", required=True, help="integral AST JSON path or - for stdin")
    p.add_argument("--x0", default=None)
    _add_common(p)

    p = sub.add_parser("oracle", help="dump the curl residual for given Ansatz parameters")
    p.add_argument("--input", required=True)
    p.add_argument("--ansatz", choices=("2d", "t1", "t2"), required=True)
    p.add_argument("--alpha", type=_frac, default=Fraction(0))
    p.add_argument("--beta", type=_frac, default=Fraction(0))
    p.add_argument("--gamma", type=_frac, default=Fraction(0))
    p.add_argument("--l1", type=_frac, default=Fraction(1))
    p.add_argument("--l2", type=_frac, default=Fraction(1))
    p.add_argument("--l3", type=_frac, default=Fraction(1))
    _add_common(p)

    p = sub.add_parser("sweep", help="sample a rule's condition manifold and verify")
    p.add_argument("--rule", required=True)
    p.add_argument("--count", type=int, default=20)
    _add_common(p)

    p = sub.add_parser("catalog", help="print the full rule catalog")
    _add_common(p)
    return ap


def _detections_payload(s, dets, cands, args, do_verify: bool, x0=None):
    seed = _seed_of(args)
    region = _region_of(args)
    out = []
    worst = {"lie_max": 0.0, "max_rel_drift": 0.0}
    all_ok = True
    for d in dets:
        rec = d.to_json_obj()
        if do_verify:
            ver: dict = {}
            try:
                ver["lie_max"] = lie_check(
                    d.integral, s, n=args.points, region=region, seed=seed
                )
            except DomainViolation as exc:
                ver["lie_max"] = None
                ver["lie_error"] = str(exc)
            drift = _drift_from_point(d.integral, s, args, x0)
            ver.update(drift)
            rec["verification"] = ver
            d.verification = ver
            lie = ver.get("lie_max")
            dr = ver.get("max_rel_drift")
            if lie is None or lie > args.tol_lie:
                all_ok = False
            else:
                worst["lie_max"] = max(worst["lie_max"], lie)
            if dr is not None:
                worst["max_rel_drift"] = max(worst["max_rel_drift"], dr)
        out.append(rec)
    return out, worst, all_ok


_X0_CANDIDATES = ((1.0,), (0.9, 1.1), (1.3, 0.7, 1.1), (0.5, 1.5, 0.8))


def _drift_from_point(h, s, args, x0=None):
    """Conservation drift from x0 (default all-ones, falling back to nearby
    in-domain points when logs or blow-up demand it)."""
    candidates = []
    if x0 is not None:
        candidates.append(tuple(x0))
    else:
        candidates.append(tuple(1.0 for _ in range(s.dim)))
        for c in _X0_CANDIDATES:
            if len(c) == s.dim:
                candidates.append(c)
        candidates.append(tuple(0.9 + 0.05 * i for i in range(s.dim)))
    last_err = None
    for cand in candidates:
        try:
            tr = integrate(s, cand, args.t_end, args.step, args.method)
            rep = conservation_report(h, tr)
            return {
                "x0": list(cand),
                "max_rel_drift": rep.max_rel_drift,
                "max_abs_drift": rep.max_abs_drift,
                "H0": rep.H0,
                "blew_up": rep.blew_up,
            }
        except (DomainViolation, ex.EvalDomainError, OverflowError) as exc:
            last_err = str(exc)
    return {"x0": None, "max_rel_drift": None, "drift_error": last_err}


def cmd_detect(args) -> int:
    try:
        s = parse_system(_read_text(args.input))
    except (OSError, ModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    dets, cands = detect2d_full(s) if s.dim == 2 else detect3d_full(s)
    payload, worst, _ = _detections_payload(
        s, dets, cands, args, do_verify=not args.no_verify,
        x0=_parse_x0(args.x0) if args.x0 else None,
    )
    doc = {
        "detections": payload,
        "candidates_failed_oracle": [
            {"rule": c.rule_id, "sigma": [i + 1 for i in c.sigma], "reason": c.reason}
            for c in cands
        ],
    }
    if args.format == "json":
        print(json.dumps(doc, indent=2, default=str))
    else:
        if not dets:
            print("no first integral found within the Ansatz catalog")
        for rec in payload:
            print(f"rule {rec['rule']}  [{rec['citation']}]")
            if rec["sigma"] != list(range(1, s.dim + 1)):
                print(f"  coordinates relabeled via sigma = {rec['sigma']}")
            if rec["params"]:
                print(f"  parameters: {json.dumps(rec['params'])}")
            print(f"  H = {rec['integral_pretty']}")
            print(f"  oracle: {rec['oracle']}")
            if rec.get("paper_formula_deviation"):
                print(f"  paper_formula_deviation: {rec['paper_formula_deviation']}")
            ver = rec.get("verification")
            if ver:
                print(
                    f"  verification: lie_max = {ver.get('lie_max')}, "
                    f"max_rel_drift = {ver.get('max_rel_drift')}"
                    + (f" (x0 = {ver.get('x0')})" if ver.get("x0") else "")
                )
        for c in doc["candidates_failed_oracle"]:
            print(f"candidate (failed oracle): {c['rule']} - {c['reason']}")
    return EXIT_OK if dets else EXIT_NEGATIVE


def _parse_x0(text):
    return tuple(float(v) for v in text.split(","))


def cmd_verify(args) -> int:
    try:
        s = parse_system(_read_text(args.input))
        h = ex.from_json(_read_text(args.integral))
    except (OSError, ModelError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if ex.max_var_index(h) >= s.dim:
        print("error: integral uses variables beyond the system dimension", file=sys.stderr)
        return EXIT_INPUT
    seed = _seed_of(args)
    region = _region_of(args)
    x0 = _parse_x0(args.x0) if args.x0 else tuple(1.0 for _ in range(s.dim))
    try:
        lie = lie_check(h, s, n=args.points, region=region, seed=seed)
        tr = integrate(s, x0, args.t_end, args.step, args.method)
        rep = conservation_report(h, tr)
    except (DomainViolation, ex.EvalDomainError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    rep.lie_max = lie
    doc = rep.to_json_obj()
    ok = lie <= args.tol_lie and rep.max_rel_drift <= args.tol_drift
    doc["pass"] = ok
    if args.format == "json":
        print(json.dumps(doc, indent=2))
    else:
        print(f"lie_max        = {lie}")
        print(f"H0             = {rep.H0}")
        print(f"max_abs_drift  = {rep.max_abs_drift}")
        print(f"max_rel_drift  = {rep.max_rel_drift}")
        if rep.blew_up:
            print("trajectory stopped early (blow-up guard)")
        print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_oracle(args) -> int:
    try:
        s = parse_system(_read_text(args.input))
    except (OSError, ModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        if args.ansatz == "2d":
            if s.dim != 2:
                raise AnsatzError("2d ansatz needs a 2D system")
            comps = [residual_2d(s, args.alpha, args.beta, args.gamma)]
        else:
            if s.dim != 3:
                raise AnsatzError(f"{args.ansatz} ansatz needs a 3D system")
            spec = AnsatzSpec("3d-" + args.ansatz)
            comps = residual_3d(
                s, spec, (args.alpha, args.beta, args.gamma), (args.l1, args.l2, args.l3)
            )
    except AnsatzError as exc:
        print(f"ansatz undefined: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    dump = residual_dump(comps)
    if args.format == "json":
        print(json.dumps({"residual": dump}, indent=2))
    else:
        if not dump:
            print("residual is identically zero")
        for rec in dump:
            print(
                f"component {rec['component']}  x^{tuple(rec['exponents'])}  "
                f"coefficient {rec['coefficient']}"
            )
    return EXIT_OK if not dump else EXIT_NEGATIVE


def cmd_sweep(args) -> int:
    samplers = dict(SAMPLERS_2D)
    samplers.update(SAMPLERS_3D)
    if args.rule not in samplers or samplers[args.rule] is None:
        known = ", ".join(sorted(samplers))
        print(f"error: unknown rule {args.rule!r}; known: {known}", file=sys.stderr)
        return EXIT_INPUT
    sampler = samplers[args.rule]
    rng = random.Random(_seed_of(args))
    family = args.rule.split("/")[0].replace("-mirror", "")
    results = []
    for k in range(args.count):
        s = sampler(rng)
        dets, _ = detect2d_full(s) if s.dim == 2 else detect3d_full(s)
        hits = [d for d in dets if d.rule_id.split("/")[0] == family]
        if not hits:
            results.append({"index": k, "pass": False, "reason": "no detection"})
            continue
        d = hits[0]
        lie = lie_check(d.integral, s, n=args.points, region=_region_of(args), seed=_seed_of(args))
        rec = {
            "index": k,
            "pass": lie <= args.tol_lie,
            "lie_max": lie,
            "rule": d.rule_id,
        }
        if d.paper_formula_deviation:
            rec["paper_formula_deviation"] = d.paper_formula_deviation
        results.append(rec)
    npass = sum(1 for r in results if r["pass"])
    worst = max((r.get("lie_max", 0.0) or 0.0) for r in results)
    if args.format == "json":
        print(
            json.dumps(
                {"rule": args.rule, "pass": npass, "total": len(results),
                 "worst_lie_max": worst, "samples": results},
                indent=2,
            )
        )
    else:
        print(f"rule {args.rule}: {npass}/{len(results)} pass, worst lie_max = {worst}")
        notes = {r.get("paper_formula_deviation") for r in results if r.get("paper_formula_deviation")}
        for n in sorted(notes):
            print(f"  paper_formula_deviation: {n}")
        for r in results:
            if not r["pass"]:
                print(f"  sample {r['index']}: FAIL ({r.get('reason', 'lie check')})")
    return EXIT_OK if npass == len(results) else EXIT_NEGATIVE


def cmd_catalog(args) -> int:
    records = []
    for r in RULES_2D + RULES_3D:
        records.append(
            {
                "id": r.id,
                "citation": r.citation,
                "dim": r.dim,
                "residuals": r.residuals,
                "guards": r.guards,
                "notes": r.notes,
            }
        )
    if args.format == "json":
        print(json.dumps(records, indent=2))
    else:
        for rec in records:
            print(f"{rec['id']}  ({rec['dim']}D)  {rec['citation']}")
            if rec["residuals"]:
                print(f"  vanishing: {'; '.join(rec['residuals'])}")
            if rec["guards"]:
                print(f"  guards:    {'; '.join(rec['guards'])}")
            for n in rec["notes"]:
                print(f"  note:      {n}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        handler = {
            "detect": cmd_detect,
            "verify": cmd_verify,
            "oracle": cmd_oracle,
            "sweep": cmd_sweep,
            "catalog": cmd_catalog,
        }[args.command]
        return handler(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
