"""Command line entry point: ``satadvice <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from functools import partial
from pathlib import Path

from . import theory
from .advice import (LabelAdvice, SubsetAdvice, gen_label_advice, gen_subset_advice,
                     read_advice, subset_to_label, write_advice)
from .cnf import read_assignment, read_dimacs, write_assignment, write_dimacs
from .experiment import load_spec, run_experiment, write_report
from .instances import CONSTRUCTIONS, gen_planted
from .labelqp import (QPSolveError, advice_sign_vector, build_model, lin2_to_sat2,
                      max2sat_with_label_advice, parse_lin, sign_vector)
from .maxsat import (advice_pipeline, baseline_condexp, baseline_follow_label, baseline_random,
                     brute_force_maxsat)
from .solvers import AdviceContradiction, SolverConfig, ppsz_with_advice

EXIT_SAT = 10
EXIT_UNSAT_PRESUMED = 20
EXIT_ADVICE_CONTRADICTION = 30
MAX_D = 3


def _emit(obj):
    json.dump(obj, sys.stdout, indent=2, default=float)
    sys.stdout.write("\n")


def cmd_gen(args):
    inst = gen_planted(args.construction, args.n, args.m, args.k, args.seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_dimacs(inst.formula, out, comments=[f"{inst.construction} {json.dumps(inst.params)}"])
    write_assignment(inst.planted, out.with_suffix(".planted"))
    if inst.lin is not None:
        lin_path = out.with_suffix(".lin")
        lin_path.write_text("".join(f"{i} {j} {c}\n" for i, j, c in inst.lin))
    _emit({"cnf": str(out), "planted": str(out.with_suffix(".planted")), **inst.params})


def cmd_advice(args):
    x = read_assignment(args.planted)
    adv = (gen_subset_advice if args.model == "subset" else gen_label_advice)(x, args.eps, args.seed)
    write_advice(adv, args.out)


def cmd_decide(args):
    phi = read_dimacs(args.cnf)
    advice = read_advice(args.advice) if args.advice else None
    if isinstance(advice, LabelAdvice):
        sys.exit("decide needs subset advice")
    if not 1 <= args.D <= MAX_D:
        sys.exit(f"--D must lie in 1..{MAX_D}")
    cfg = SolverConfig(args.D, args.T if args.T else "auto", args.delta, args.seed)
    try:
        res = ppsz_with_advice(phi, advice, cfg)
    except AdviceContradiction as exc:
        _emit({"verdict": "advice-contradiction", "detail": str(exc)})
        return EXIT_ADVICE_CONTRADICTION
    _emit({"verdict": res.verdict,
           "assignment": None if res.assignment is None else "".join(map(str, res.assignment)),
           "stats": res.stats.to_dict()})
    return EXIT_SAT if res.verdict == "sat" else EXIT_UNSAT_PRESUMED


def cmd_maxsat(args):
    phi = read_dimacs(args.cnf)
    advice = read_advice(args.advice) if args.advice else None
    opt = brute_force_maxsat(phi)[0] if args.oracle else None
    results = []
    for t in range(args.trials):
        seed = args.seed + t
        if args.baseline == "follow-label":
            if advice is None:
                sys.exit("follow-label needs --advice")
            label = advice if isinstance(advice, LabelAdvice) else subset_to_label(advice, seed)
            res = baseline_follow_label(phi, label)
        else:
            base = partial(baseline_random, seed=seed) if args.baseline == "random" else baseline_condexp
            if isinstance(advice, SubsetAdvice):
                res = advice_pipeline(phi, advice, base)
            elif advice is None:
                res = base(phi)
            else:
                sys.exit("the pipeline needs subset advice")
        if opt is not None:
            res.with_opt(opt)
        results.append(res)
    sats = [r.satisfied for r in results]
    summary = {"trials": len(results), "m": phi.m, "opt": opt,
               "mean_satisfied": sum(sats) / len(sats), "min_satisfied": min(sats), "max_satisfied": max(sats)}
    if opt:
        summary["mean_ratio"] = summary["mean_satisfied"] / opt
    _emit({"results": [r.to_dict() for r in results], "summary": summary})


def cmd_max2sat_label(args):
    phi = read_dimacs(args.cnf)
    advice = read_advice(args.advice)
    if isinstance(advice, SubsetAdvice):
        advice = subset_to_label(advice, args.seed)
    try:
        res, sol = max2sat_with_label_advice(phi, advice, args.gap)
    except QPSolveError as exc:
        _emit({"error": str(exc)})
        return 1
    out = {"result": res.to_dict(), "objective_F": sol.objective_F, "solver_gap": sol.solver_gap}
    if args.audit_chain:
        y_star = sign_vector(read_assignment(args.planted)) if args.planted else None
        out["chain"] = sol.chain(build_model(phi), advice_sign_vector(advice), advice.epsilon, y_star)
    _emit(out)


def cmd_lin2sat(args):
    cons, n = parse_lin(Path(args.lin).read_text())
    phi = lin2_to_sat2(cons, args.n or n)
    if args.out:
        write_dimacs(phi, args.out)
    else:
        sys.stdout.write(phi.to_dimacs())


def cmd_theory(args):
    if args.table1:
        _emit(theory.table1())
        return
    if args.k is None or args.eps is None:
        sys.exit("theory needs --k and --eps, or --table1")
    _emit(theory.base_constants(args.k, args.eps, args.d).to_dict())


def cmd_experiment(args):
    report = run_experiment(load_spec(args.spec))
    paths = write_report(report, args.out)
    _emit({"outputs": {k: str(v) for k, v in paths.items()}, "checks": report.checks})


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="satadvice", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="generate an instance with a planted assignment")
    g.add_argument("--construction", choices=CONSTRUCTIONS, default="planted-satisfiable")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--k", type=int, default=3)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, help="DIMACS path; .planted written alongside")
    g.set_defaults(func=cmd_gen)

    a = sub.add_parser("advice", help="derive an advice file from a planted assignment")
    a.add_argument("--planted", required=True)
    a.add_argument("--model", choices=("subset", "label"), required=True)
    a.add_argument("--eps", type=float, required=True)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--out", required=True)
    a.set_defaults(func=cmd_advice)

    d = sub.add_parser("decide", help="PPZ/PPSZ with subset advice")
    d.add_argument("--cnf", required=True)
    d.add_argument("--advice")
    d.add_argument("--D", type=int, default=1)
    d.add_argument("--delta", type=float, default=0.01)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--T", type=int)
    d.set_defaults(func=cmd_decide)

    m = sub.add_parser("maxsat", help="MAX-SAT baselines and the subset-advice pipeline")
    m.add_argument("--cnf", required=True)
    m.add_argument("--advice")
    m.add_argument("--baseline", choices=("random", "condexp", "follow-label"), default="random")
    m.add_argument("--trials", type=int, default=1)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--oracle", action="store_true", help="exact OPT by enumeration (n <= 26)")
    m.set_defaults(func=cmd_maxsat)

    q = sub.add_parser("max2sat-label", help="MAX-2-SAT with label advice")
    q.add_argument("--cnf", required=True)
    q.add_argument("--advice", required=True)
    q.add_argument("--gap", type=float, default=1e-6)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--audit-chain", action="store_true")
    q.add_argument("--planted", help="plant assignment file, enables F(y*, y~) in the audit")
    q.set_defaults(func=cmd_max2sat_label)

    ls = sub.add_parser("lin2sat", help="convert MAX-2-LIN (lines 'i j +-1') to DIMACS")
    ls.add_argument("--lin", required=True)
    ls.add_argument("--n", type=int)
    ls.add_argument("--out")
    ls.set_defaults(func=cmd_lin2sat)

    t = sub.add_parser("theory", help="runtime constants")
    t.add_argument("--k", type=int)
    t.add_argument("--eps", type=float)
    t.add_argument("--d", type=int)
    t.add_argument("--table1", action="store_true")
    t.set_defaults(func=cmd_theory)

    e = sub.add_parser("experiment", help="run a JSON experiment spec")
    e.add_argument("--spec", required=True)
    e.add_argument("--out", default="results")
    e.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args) or 0


if __name__ == "__main__":
    sys.exit(main())
