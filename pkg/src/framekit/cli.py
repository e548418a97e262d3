"""Command-line interface.

Exit codes: 0 when a verdict was computed (negative verdicts included),
1 for usage errors, 2 for bad input and 3 for numerical failure.  Indices on
the command line and in reports are 1-based.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from contextlib import contextmanager

import numpy as np

from . import bridging, dilation, duals, io, mrc, robustness, verify
from .core import fixture, frame_bounds, frame_operator, random_frame
from .errors import InputError, NoBridge, NumericalError

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _index_list(text: str) -> list[int]:
    """``"1,3,5-7"`` to 0-based indices."""
    out = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        if "-" in part:
            lo, hi = (int(x) for x in part.split("-", 1))
            out.extend(range(lo, hi + 1))
        else:
            out.append(int(part))
    if any(i < 1 for i in out):
        raise argparse.ArgumentTypeError("indices are 1-based")
    return [i - 1 for i in out]


def _one_based(idx):
    return None if idx is None else [int(i) + 1 for i in idx]


class _Run:
    """Collects inputs, timings and verdicts for one command."""

    def __init__(self, command: str):
        self.command = command
        self.inputs = []
        self.timings = {}

    @contextmanager
    def phase(self, name: str):
        t0 = time.perf_counter()
        yield
        self.timings[f"{name}_ms"] = (time.perf_counter() - t0) * 1e3

    def frame(self, path):
        self.inputs.append(path)
        with self.phase("parse"):
            return io.parse_frame_file(path)

    def pair(self, path):
        self.inputs.append(path)
        with self.phase("parse"):
            return io.parse_pair_file(path)

    def report(self, verdicts) -> io.Report:
        return io.Report(self.command, io.inputs_digest(self.inputs), verdicts, self.timings)


# -- commands ---------------------------------------------------------------


def cmd_gen(args, run):
    if args.fixture:
        F = fixture(args.fixture)
    else:
        if args.dim is None or args.count is None:
            raise UsageError("gen needs --dim and --count, or --fixture")
        F = random_frame(args.dim, args.count, args.seed, kind=args.kind, field=args.field)
    if args.dual == "none":
        payload = io.frame_to_dict(F)
    else:
        pair = duals.canonical_dual(F)
        if args.dual == "random":
            pair = duals.perturbed_dual(pair, duals.random_dual_perturbation(F, args.seed, args.scale))
        payload = io.pair_to_dict(pair)
    return None, io.canonical_json(payload)


def cmd_analyze(args, run):
    F = run.frame(args.frame)
    with run.phase("compute"):
        b = frame_bounds(F)
        ex = robustness.excess(F)
        v = {
            "dim": F.dim,
            "count": F.count,
            "field": "real" if F.is_real else "complex",
            "frame_bounds": {"lower": b.lower, "upper": b.upper},
            "tight": bool(b.is_tight),
            "parseval": bool(abs(b.lower - 1) <= F.tol.eq_tol and abs(b.upper - 1) <= F.tol.eq_tol),
            "frame_operator": frame_operator(F),
            "spark": robustness.spark(F, args.budget),
            "excess": {"sup": ex.sup_excess, "uniform": ex.uniform_excess},
        }
    return v, None


def cmd_dual(args, run):
    F = run.frame(args.frame)
    with run.phase("compute"):
        pair = duals.canonical_dual(F)
        kind = "canonical"
        if args.perturb:
            pair = duals.perturbed_dual(pair, duals.random_dual_perturbation(F, args.seed, args.scale))
            kind = "perturbed"
        ok, r = duals.is_dual_pair(pair.primary, pair.dual)
    if args.pair_out:
        io.write_pair_file(pair, args.pair_out)
    return {"kind": kind, "dual": io.frame_to_dict(pair.dual), "is_dual": ok, "residual": r}, None


def _mrc_payload(v: mrc.MrcVerdict):
    return {
        "erased": _one_based(v.erased),
        "satisfied": v.satisfied,
        "certificate": v.certificate,
        "threshold": v.threshold,
        "marginal": v.marginal,
        "reduced_bounds": None if v.reduced_bounds is None
        else {"lower": v.reduced_bounds.lower, "upper": v.reduced_bounds.upper},
    }


def cmd_mrc(args, run):
    F = run.frame(args.frame)
    with run.phase("compute"):
        if args.size is not None:
            return {"size": args.size, "sweep": [_mrc_payload(v) for v in mrc.mrc_sweep(F, args.size)]}, None
        target = F
        if args.dual == "canonical":
            target = duals.canonical_dual(F).dual
        elif args.dual:
            target = run.pair(args.dual).dual if _is_pair_file(args.dual) else run.frame(args.dual)
            if not duals.is_dual_pair(F, target)[0]:
                raise InputError(f"{args.dual} is not a dual of {args.frame}")
        return _mrc_payload(mrc.satisfies_mrc(target, args.erase or [])), None


def _is_pair_file(path) -> bool:
    obj = io._load_json(path)
    return isinstance(obj, dict) and "primary" in obj


def cmd_robustness(args, run):
    F = run.frame(args.frame)
    strategy = "exhaustive" if args.exhaustive else ("sampled" if args.sample else "auto")
    with run.phase("compute"):
        r = robustness.is_m_erasure_robust(
            F, args.m, strategy=strategy, budget=args.budget, trials=args.sample or 10_000, seed=args.seed
        )
    v = {
        "m": r.m,
        "robust": r.robust,
        "checked_subsets": r.checked_subsets,
        "failing_subset": _one_based(r.failing_subset),
        "strategy": r.strategy,
        "probabilistic": r.probabilistic,
        "min_certificate": r.min_certificate,
    }
    if r.probabilistic:
        v.update(seed=r.seed, trials=r.trials)
    return v, None


def cmd_gamma(args, run):
    F = run.frame(args.frame)
    with run.phase("compute"):
        perm = None
        if args.reorder:
            F, perm = robustness.reorder_tail_basis(F, args.m)
        g = robustness.build_gamma(F, args.m)
        rn = robustness.verify_range_equals_nullspace(F, g)
        cols = robustness.gamma_columns_independent(g, args.m, budget=args.budget) if args.m else None
    v = {
        "m": args.m,
        "gamma": g.entries,
        "permutation": _one_based(perm),
        "range_equals_null": {
            "equal": rn.equal,
            "range_in_null": rn.range_in_null,
            "null_in_range": rn.null_in_range,
            "range_dim": rn.range_dim,
            "null_dim": rn.null_dim,
        },
    }
    if cols is not None:
        v["columns"] = {
            "independent": cols.independent,
            "witness": _one_based(cols.witness),
            "min_certificate": cols.min_certificate,
            "checked_subsets": cols.checked_subsets,
            "strategy": cols.strategy,
        }
    return v, None


def cmd_excess(args, run):
    F = run.frame(args.frame)
    with run.phase("compute"):
        ex = robustness.excess(F)
    return {"sup_excess": ex.sup_excess, "uniform_excess": ex.uniform_excess}, None


def _plan_payload(pair, plan: bridging.BridgePlan):
    E = bridging.reduced_error_operator(pair, plan)
    return {
        "bridge_exists": True,
        "erased": _one_based(plan.erased),
        "delta": _one_based(plan.delta),
        "coefficients": plan.coefficients,
        "replacement_duals": plan.replacement_duals.T,
        "residual": plan.residual,
        "cross_residual": plan.cross_residual,
        "nilpotency_residual": E.nilpotency_residual,
    }


def cmd_bridge(args, run):
    pair = run.pair(args.pair)
    if args.analysis_side:
        pair = pair.swapped()
    with run.phase("compute"):
        try:
            if args.delta is not None:
                plan = bridging.solve_bridge(pair, args.erase, args.delta)
            else:
                plan = bridging.find_bridge_set(pair, args.erase, budget=args.budget)
        except NoBridge as exc:
            return {"bridge_exists": False, "erased": _one_based(sorted(args.erase)),
                    "residual": exc.residual, "reason": str(exc)}, None
        v = _plan_payload(pair, plan)
        if args.coeffs:
            run.inputs.append(args.coeffs)
            streams = io.read_coefficient_csv(args.coeffs, pair.count)
            v["recovered"] = {sid: bridging.recover(pair, plan, c) for sid, c in streams.items()}
    return v, None


def _parse_model(text: str, seed: int):
    kind, _, rest = text.partition(":")
    try:
        if kind == "random":
            return bridging.RandomErasures(float(rest), seed)
        if kind == "burst":
            start, length = (int(x) for x in rest.split(":"))
            return bridging.BurstErasures(start - 1, length)
        if kind == "fixed":
            return bridging.FixedErasures(tuple(_index_list(rest)))
    except (ValueError, argparse.ArgumentTypeError):
        pass
    raise UsageError(f"bad --model {text!r}; use random:p, burst:start:len or fixed:i,j")


def cmd_simulate(args, run):
    pair = run.pair(args.pair)
    if args.analysis_side:
        pair = pair.swapped()
    model = _parse_model(args.model, args.seed)
    run.inputs.append(args.signals)
    signals = io.read_coefficient_csv(args.signals, pair.dim)
    for sid, vec in signals.items():
        if not np.all(np.isfinite(vec)):
            raise InputError(f"signal {sid} is missing coordinates")
    with run.phase("compute"):
        rep = bridging.simulate_channel(pair, list(signals.values()), model)
    ids = list(signals)
    records = [
        {
            "signal_id": ids[r.index],
            "erased": _one_based(r.erased),
            "status": r.status,
            "delta": _one_based(r.delta),
            "rel_error": r.rel_error,
        }
        for r in rep.records
    ]
    return {"model": args.model, "seed": args.seed, "summary": rep.summary, "records": records}, None


def cmd_dilate(args, run):
    F = run.frame(args.frame)
    with run.phase("compute"):
        D = dilation.naimark_dilate(F)
    return {
        "big_dim": D.big_dim,
        "P": D.projection,
        "onb": D.onb,
        "embedding": D.embedding,
        "image_residual": D.image_residual(),
        "idempotency_residual": D.idempotency_residual(),
        "norm_identity_residual": dilation.norm_identity_check(F),
    }, None


def cmd_certify(args, run):
    F = run.frame(args.frame)
    with run.phase("compute"):
        c = dilation.one_erasure_certificate(F)
        robust = robustness.is_m_erasure_robust(F, 1).robust if F.count > 1 else False
        w = dilation.complement_witness(dilation.naimark_dilate(F))
    v = {"present": c.present, "robust_1_erasure": robust, "attempts": c.attempts,
         "complement_witness": w.present}
    if c.present:
        v.update(coefficients=c.coefficients, residual=c.residual, min_abs=c.min_abs)
    else:
        v.update(witness_index=c.witness + 1, witness_sigma=c.witness_sigma)
    return v, None


def cmd_verify_all(args, run):
    names = args.only.split(",") if args.only else None
    if names:
        unknown = [n for n in names if n not in verify.SUITES]
        if unknown:
            raise UsageError(f"unknown suites {unknown}; choose from {list(verify.SUITES)}")
    suites = {}
    for name in names or verify.SUITES:
        with run.phase(name):
            r = verify.run_suite(name, args.seed)
        suites[name] = {
            "passed": r.passed,
            "checked": r.checked,
            "failures": r.failures,
            "excluded": r.excluded,
            "details": r.details,
            "examples": r.examples,
        }
        if not args.quiet:
            print(r.line(), file=sys.stderr)
    return {"seed": args.seed, "all_passed": all(s["passed"] for s in suites.values()),
            "suites": suites}, None


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (FRAMEKIT_SEED overrides)")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--budget", type=int, default=100_000, help="subset enumeration budget")

    p = _Parser(prog="framekit", description="Finite frame erasure toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_, description=help_)
        sp.set_defaults(func=func)
        return sp

    sp = add("gen", cmd_gen, "generate a random or built-in frame (or dual pair) as JSON")
    sp.add_argument("--dim", type=int)
    sp.add_argument("--count", type=int)
    sp.add_argument("--kind", choices=["generic", "parseval", "tight"], default="generic")
    sp.add_argument("--field", choices=["complex", "real"], default="complex")
    sp.add_argument("--fixture", choices=["E2", "M3", "U3"])
    sp.add_argument("--dual", choices=["none", "canonical", "random"], default="none",
                    help="emit a dual pair with this dual")
    sp.add_argument("--scale", type=float, default=1.0, help="size of a random dual perturbation")

    sp = add("analyze", cmd_analyze, "frame bounds, spark and excess")
    sp.add_argument("--frame", required=True)

    sp = add("dual", cmd_dual, "canonical or seeded perturbed dual")
    sp.add_argument("--frame", required=True)
    sp.add_argument("--perturb", action="store_true", help="add a seeded random dual perturbation")
    sp.add_argument("--scale", type=float, default=1.0)
    sp.add_argument("--pair-out", help="also write the dual pair JSON here")

    sp = add("mrc", cmd_mrc, "minimal redundancy condition for an erasure set")
    sp.add_argument("--frame", required=True)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--erase", type=_index_list, help="1-based indices, e.g. 1,3 or 2-4")
    g.add_argument("--size", type=int, help="sweep every erasure set of this size")
    sp.add_argument("--dual", nargs="?", const="canonical",
                    help="test a dual instead: 'canonical' or a dual frame / pair JSON file")

    sp = add("robustness", cmd_robustness, "m-erasure robustness")
    sp.add_argument("--frame", required=True)
    sp.add_argument("--m", type=int, required=True)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--exhaustive", action="store_true")
    g.add_argument("--sample", type=int, help="check this many seeded random subsets")

    sp = add("gamma", cmd_gamma, "the Γ matrix, its null space and column independence")
    sp.add_argument("--frame", required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--reorder", action="store_true", help="permute so the tail is a basis")

    sp = add("excess", cmd_excess, "sup and uniform excess")
    sp.add_argument("--frame", required=True)

    sp = add("bridge", cmd_bridge, "bridge set and recovery for an erasure set")
    sp.add_argument("--pair", required=True, help="dual pair JSON, or a frame (canonical dual)")
    sp.add_argument("--erase", type=_index_list, required=True)
    sp.add_argument("--delta", type=_index_list, help="use this bridge set instead of searching")
    sp.add_argument("--coeffs", help="coefficient CSV to recover (signal_id,index,re,im)")
    sp.add_argument("--analysis-side", action="store_true",
                    help="coefficients are <f, f_i>: swap the roles of the two frames")

    sp = add("simulate", cmd_simulate, "erasure channel simulation")
    sp.add_argument("--pair", required=True)
    sp.add_argument("--signals", required=True, help="signal CSV (signal_id,index,re,im)")
    sp.add_argument("--model", required=True, help="random:p, burst:start:len or fixed:i,j")
    sp.add_argument("--analysis-side", action="store_true")

    sp = add("dilate", cmd_dilate, "Naimark dilation")
    sp.add_argument("--frame", required=True)

    sp = add("certify-1-erasure", cmd_certify, "all-nonzero dependence certificate")
    sp.add_argument("--frame", required=True)

    sp = add("verify-all", cmd_verify_all, "run the seeded property suites")
    sp.add_argument("--only", help="comma-separated suite names")
    sp.add_argument("--quiet", action="store_true", help="no per-suite lines on stderr")
    return p


def run_command(argv=None) -> tuple[int, io.Report | None]:
    """Parse and execute; returns the exit code and the report, if any."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        env_seed = os.environ.get("FRAMEKIT_SEED")
        if env_seed is not None:
            args.seed = int(env_seed)
        run = _Run(args.command)
        with run.phase("total"):
            verdicts, text = args.func(args, run)
        if text is not None:
            if args.out:
                io._write_text(args.out, text)
            else:
                sys.stdout.write(text)
            return EXIT_OK, None
        report = run.report(verdicts)
        out = io.write_report(report, args.out)
        if not args.out:
            sys.stdout.write(out)
        return EXIT_OK, report
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"framekit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE, None
    except ValueError as exc:
        # InputError and its subclasses are ValueErrors too.
        print(f"framekit: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT, None
    except (NumericalError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"framekit: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL, None


def main(argv=None) -> int:
    code, _ = run_command(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
