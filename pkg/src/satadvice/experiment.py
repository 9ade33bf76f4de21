"""Parameter sweeps over the solvers with theory predictions alongside.

A spec is JSON::

    {"name": "ppz-sweep", "op": "ppz-guessed",
     "instance": {"construction": "planted-unique-attempt", "n": 16, "m": 48, "k": 3, "seed": 1},
     "grid": {"epsilon": [0, 0.2, 0.4], "D": [1]},
     "trials": 20, "seed": 0, "options": {"samples": 50}}

Trial t of every cell uses seed ``spec.seed + t``, so cells are paired.
Worker count comes from SATADVICE_WORKERS (default 1, in-process).
"""

from __future__ import annotations

import csv
import itertools
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import partial
from pathlib import Path

import numpy as np

from . import theory
from .advice import gen_label_advice, gen_subset_advice
from .instances import PlantedInstance, gen_planted
from .labelqp import advice_sign_vector, build_model, max2sat_with_label_advice, sign_vector
from .maxsat import advice_pipeline, baseline_condexp, baseline_random, brute_force_maxsat
from .solvers import guessed_on_correct_path

log = logging.getLogger(__name__)

WORKERS_ENV = "SATADVICE_WORKERS"
Z95 = 1.959963984540054


@dataclass
class ExperimentSpec:
    name: str
    op: str
    grid: dict
    trials: int = 1
    seed: int = 0
    instance: dict | None = None
    options: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        spec = cls(**d)
        if spec.op not in OPS:
            raise ValueError(f"unknown op {spec.op!r}; choose from {sorted(OPS)}")
        if not spec.grid or any(not v for v in spec.grid.values()):
            raise ValueError("grid must be non-empty")
        if spec.trials < 1:
            raise ValueError("trials must be >= 1")
        return spec

    def cells(self) -> list[dict]:
        keys = sorted(self.grid)
        return [dict(zip(keys, vals)) for vals in itertools.product(*(self.grid[k] for k in keys))]


@dataclass
class ExperimentReport:
    spec: dict
    rows: list[dict]
    summary: list[dict]
    checks: dict

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, default=float)


def _instance(spec: ExperimentSpec) -> PlantedInstance:
    p = dict(spec.instance or {})
    return gen_planted(p.pop("construction"), p.pop("n"), p.pop("m"), p.pop("k"), p.pop("seed", 0), **p)


def _opt(inst: PlantedInstance) -> int:
    if inst.construction != "uniform-random-kcnf":
        return inst.formula.m
    return brute_force_maxsat(inst.formula)[0]


def _op_ppz_guessed(inst, cell, seed, options):
    eps, D = float(cell["epsilon"]), int(cell.get("D", 1))
    adv = gen_subset_advice(inst.planted, eps, seed)
    st = guessed_on_correct_path(inst.formula, inst.planted, adv, D, int(options.get("samples", 50)), seed)
    k = inst.formula.width
    return {"mean_guessed": st.mean_guessed(), "mean_forced": float(np.mean(st.forced)),
            "advice": len(adv)}, {"mean_guessed": inst.n * theory.ppz_exponent(k, eps)}


def _op_maxsat_pipeline(inst, cell, seed, options):
    eps = float(cell["epsilon"])
    name = cell.get("baseline", "random")
    base = partial(baseline_random, seed=seed + 1_000_003) if name == "random" else baseline_condexp
    adv = gen_subset_advice(inst.planted, eps, seed)
    res = advice_pipeline(inst.formula, adv, base)
    opt = options.get("opt") or _opt(inst)
    alpha = 1.0 - 2.0 ** -inst.formula.width
    return {"ratio": res.satisfied / opt, "satisfied": res.satisfied}, {"ratio": alpha + (1 - alpha) * eps}


def _op_max2sat_label(inst, cell, seed, options):
    eps = float(cell["epsilon"])
    adv = gen_label_advice(inst.planted, eps, seed)
    res, sol = max2sat_with_label_advice(inst.formula, adv, float(options.get("gap", 1e-6)))
    model = build_model(inst.formula)
    ch = sol.chain(model, advice_sign_vector(adv), eps, sign_vector(inst.planted))
    m, n = inst.formula.m, inst.n
    unsat = 1.0 - res.satisfied / m
    chain_ok = (ch["f_rounded"] <= ch["f_relaxed"] + 1e-9 and ch["f_relaxed"] <= ch["F_relaxed"] + 1e-9
                and ch["F_relaxed"] <= ch["F_star"] + 1e-6 * abs(ch["F_star"]))
    return ({"unsat_fraction": unsat, "chain_ok": float(chain_ok),
             "C_estimate": unsat * eps * math.sqrt(m / n), **ch},
            {"unsat_fraction": 1.0 / (eps * math.sqrt(m / n))})


def _op_theory(inst, cell, seed, options):
    rep = theory.base_constants(int(cell["k"]), float(cell["epsilon"]))
    vals = {k: v for k, v in rep.to_dict().items() if isinstance(v, float)}
    return vals, {}


OPS = {
    "ppz-guessed": _op_ppz_guessed,
    "maxsat-pipeline": _op_maxsat_pipeline,
    "max2sat-label": _op_max2sat_label,
    "theory": _op_theory,
}
# direction of the theory comparison: measured <= prediction ("upper") or >= ("lower")
BOUND_SIDE = {"mean_guessed": "upper", "ratio": "lower", "unsat_fraction": "upper"}


def _run_trial(spec_dict: dict, cell: dict, trial: int) -> dict:
    spec = ExperimentSpec.from_dict(spec_dict)
    inst = _instance(spec) if spec.instance else None
    seed = spec.seed + trial
    try:
        meas, pred = OPS[spec.op](inst, cell, seed, spec.options)
        err = ""
    except Exception as exc:  # recorded per cell; the sweep continues
        log.warning("cell %s trial %d failed: %s", cell, trial, exc)
        meas, pred, err = {}, {}, repr(exc)
    return {**{f"param_{k}": v for k, v in cell.items()}, "trial": trial, "seed": seed,
            **meas, **{f"pred_{k}": v for k, v in pred.items()}, "error": err}


def _summarise(spec: ExperimentSpec, rows: list[dict]) -> list[dict]:
    out = []
    for cell in spec.cells():
        mine = [r for r in rows if all(r[f"param_{k}"] == v for k, v in cell.items())]
        ok_rows = [r for r in mine if not r["error"]]
        entry = {**{f"param_{k}": v for k, v in cell.items()}, "trials": len(mine),
                 "failed_trials": len(mine) - len(ok_rows), "seeds": [r["seed"] for r in mine]}
        metrics = [k for k in (ok_rows[0] if ok_rows else {})
                   if not k.startswith(("param_", "pred_")) and k not in ("trial", "seed", "error")]
        for key in metrics:
            vals = np.array([r[key] for r in ok_rows], dtype=float)
            mean = float(vals.mean())
            half = float(Z95 * vals.std(ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
            entry[f"{key}_mean"] = mean
            entry[f"{key}_ci95"] = half
            pk = f"pred_{key}"
            if ok_rows and pk in ok_rows[0]:
                pred = float(ok_rows[0][pk])
                entry[f"{key}_prediction"] = pred
                side = BOUND_SIDE.get(key)
                if side == "upper":
                    entry[f"{key}_pass"] = mean - half <= pred
                elif side == "lower":
                    entry[f"{key}_pass"] = mean + half >= pred
        out.append(entry)
    return out


def _checks(spec: ExperimentSpec, summary: list[dict]) -> dict:
    checks = {}
    if spec.op == "ppz-guessed":
        for D in spec.grid.get("D", [1]):
            seq = [s["mean_guessed_mean"] for s in summary
                   if s.get("param_D", 1) == D and "mean_guessed_mean" in s]
            checks[f"guessed_nonincreasing_in_eps_D{D}"] = all(a >= b for a, b in zip(seq, seq[1:]))
    return checks


def run_experiment(spec: ExperimentSpec | dict, workers: int | None = None) -> ExperimentReport:
    if isinstance(spec, dict):
        spec = ExperimentSpec.from_dict(spec)
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    spec_dict = asdict(spec)
    jobs = [(cell, t) for cell in spec.cells() for t in range(spec.trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_trial, [spec_dict] * len(jobs), *zip(*jobs)))
    else:
        rows = [_run_trial(spec_dict, cell, t) for cell, t in jobs]
    summary = _summarise(spec, rows)
    return ExperimentReport(spec_dict, rows, summary, _checks(spec, summary))


def _write_csv(path: Path, rows: list[dict]):
    keys: list[str] = []
    for r in rows:
        keys += [k for k in r if k not in keys]
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=keys)
        w.writeheader()
        for r in rows:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})


def write_report(report: ExperimentReport, out_dir) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    name = report.spec["name"]
    paths = {"trials": out / f"{name}_trials.csv", "summary": out / f"{name}_summary.csv",
             "report": out / f"{name}_report.json"}
    _write_csv(paths["trials"], report.rows)
    _write_csv(paths["summary"], [{k: (json.dumps(v) if isinstance(v, list) else v) for k, v in s.items()}
                                  for s in report.summary])
    paths["report"].write_text(report.to_json())
    return paths


def load_spec(path) -> ExperimentSpec:
    with open(path) as fh:
        return ExperimentSpec.from_dict(json.load(fh))
