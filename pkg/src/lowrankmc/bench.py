"""Monte-Carlo benchmark: generate, mask, complete, score, test, report.

Each replication draws one ground truth and applies every configured
mechanism to the same Y (paired design); the MCAR arm reuses the MAR arm's
donor mask so the two arms are mask-distribution-matched by construction.
Child RNG streams are derived from (master_seed, rank-index, prop-index,
rep-index), so results are bitwise-identical regardless of worker count.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from . import __version__
from .errors import LowRankError, ParameterError
from .metrics import (
    CellSummary,
    ErrorScope,
    paired_t_test,
    relative_error,
    summarize_cell,
    welch_t_test,
)
from .missingness import (
    Mechanism,
    MechanismKind,
    MechanismSpec,
    classify_mechanism,
    donor_mcar,
    gen_nmar_logistic,
    mar_from_donor,
)
from .models import sample_gaussian_model
from .solvers import SolverConfig, hard_impute, select_lambda, soft_impute


class Solver:
    SOFT_IMPUTE = "SOFT_IMPUTE"
    HARD_IMPUTE = "HARD_IMPUTE"


@dataclass(frozen=True)
class ExperimentConfig:
    m: int = 300
    n: int = 300
    ranks: tuple[int, ...] = (5, 20)
    missing_props: tuple[float, ...] = (0.10, 0.30, 0.50, 0.80)
    mechanisms: tuple[str, ...] = ("MCAR", "MAR_ROWPERM")
    n_reps: int = 100
    sigma: float = 0.05
    signal_scale: float = 1.0
    solver: str = Solver.SOFT_IMPUTE
    lam: float | None = None          # fixed penalty; None = holdout selection
    grid_size: int = 20
    holdout_frac: float = 0.10
    solver_tol: float = 1e-5
    solver_max_iters: int = 500
    error_scope: str = "MISSING"
    master_seed: int = 0
    anchor_col: int = 0
    nmar_beta: float = 1.0
    paired_test: bool = False
    threads: int = 0                  # 0 = available cores
    out_format: str = "ascii"

    def validate(self) -> None:
        if self.m < 1 or self.n < 1:
            raise ParameterError(f"need m, n >= 1, got {self.m}x{self.n}")
        if not self.ranks or not self.missing_props or not self.mechanisms:
            raise ParameterError("ranks, missing_props, mechanisms must be nonempty")
        for q in self.ranks:
            if not 1 <= q <= min(self.m, self.n):
                raise ParameterError(f"rank {q} outside [1, {min(self.m, self.n)}]")
        for p in self.missing_props:
            if not 0.0 < p < 1.0:
                raise ParameterError(f"missing proportion {p} outside (0, 1)")
        for mech in self.mechanisms:
            if mech not in MechanismKind.__members__:
                raise ParameterError(f"unknown mechanism {mech!r}")
        if self.n_reps < 1:
            raise ParameterError(f"n_reps={self.n_reps} must be >= 1")
        if self.sigma < 0:
            raise ParameterError(f"sigma={self.sigma} must be nonnegative")
        if self.solver not in (Solver.SOFT_IMPUTE, Solver.HARD_IMPUTE):
            raise ParameterError(f"unknown solver {self.solver!r}")
        if self.lam is not None and self.lam < 0:
            raise ParameterError(f"lam={self.lam} must be nonnegative")
        if self.error_scope not in ErrorScope.__members__:
            raise ParameterError(f"unknown error scope {self.error_scope!r}")
        if not 0 <= self.anchor_col < self.n:
            raise ParameterError(f"anchor_col={self.anchor_col} outside [0, {self.n})")
        if self.out_format not in ("ascii", "csv", "json"):
            raise ParameterError(f"unknown output format {self.out_format!r}")


@dataclass(frozen=True)
class BenchReport:
    config: ExperimentConfig
    cells: tuple[CellSummary, ...]
    p_values: tuple[dict, ...]        # one per (rank, prop) when 2 mechanisms
    provenance: tuple[dict, ...]      # per-rep seed keys and Y checksums
    wall_clock_s: float
    version: str


def _mechanism_spec(mech: str, cfg: ExperimentConfig, p: float) -> MechanismSpec:
    kind = MechanismKind[mech]
    if kind is MechanismKind.NMAR_LOGISTIC:
        alpha = math.log(p / (1.0 - p))
        return MechanismSpec(kind=kind, alpha=alpha, beta=cfg.nmar_beta)
    return MechanismSpec(kind=kind, p=p, anchor_col=cfg.anchor_col)


def _replication(cfg: ExperimentConfig, ri: int, pi: int, rep: int):
    """Run one replication; returns (ri, pi, rep, errors-per-mechanism, checksum)."""
    rank = cfg.ranks[ri]
    p = cfg.missing_props[pi]
    ss = np.random.SeedSequence(cfg.master_seed, spawn_key=(ri, pi, rep))
    ss_model, ss_mask, ss_nmar, ss_solver = ss.spawn(4)
    rng_model = np.random.default_rng(ss_model)
    rng_mask = np.random.default_rng(ss_mask)

    gt = sample_gaussian_model(cfg.m, cfg.n, rank, cfg.signal_scale, cfg.sigma,
                               rng_model)
    donor = donor_mcar(cfg.m, cfg.n, p, cfg.anchor_col, rng_mask)
    scope = ErrorScope[cfg.error_scope]
    solver_cfg = SolverConfig(tol=cfg.solver_tol, max_iters=cfg.solver_max_iters)
    solver_streams = ss_solver.spawn(len(cfg.mechanisms))

    errors = []
    for k, mech in enumerate(cfg.mechanisms):
        kind = MechanismKind[mech]
        if kind is MechanismKind.MCAR:
            mask = donor
        elif kind is MechanismKind.MAR_ROWPERM:
            mask = mar_from_donor(gt.Y, donor, cfg.anchor_col)
        else:
            spec = _mechanism_spec(mech, cfg, p)
            mask = gen_nmar_logistic(gt.Y, spec.alpha, spec.beta,
                                     np.random.default_rng(ss_nmar))
        try:
            if cfg.solver == Solver.HARD_IMPUTE:
                res = hard_impute(gt.Y, mask, rank, solver_cfg)
            elif cfg.lam is not None:
                res = soft_impute(gt.Y, mask, cfg.lam, solver_cfg)
            else:
                _, path = select_lambda(
                    gt.Y, mask, grid_size=cfg.grid_size,
                    holdout_frac=cfg.holdout_frac, cfg=solver_cfg,
                    rng=np.random.default_rng(solver_streams[k]))
                res = path.result
            errors.append(relative_error(gt.Z, res.Z_hat, mask, scope))
        except LowRankError as exc:
            raise type(exc)(
                f"cell (rank={rank}, prop={p}, mechanism={mech}, rep={rep}): {exc}"
            ) from exc
    checksum = hashlib.sha256(gt.Y.tobytes()).hexdigest()[:16]
    return ri, pi, rep, errors, checksum


def _replication_star(args):
    return _replication(*args)


def run_experiment(cfg: ExperimentConfig) -> BenchReport:
    """Execute the full grid and aggregate into a report.

    Pure function of the config (master_seed included); worker count only
    affects wall-clock time.
    """
    cfg.validate()
    for mech in cfg.mechanisms:
        if classify_mechanism(_mechanism_spec(mech, cfg, cfg.missing_props[0])) \
                is Mechanism.NMAR:
            warnings.warn(
                "benchmark includes an NMAR mechanism; completion estimates are "
                "not valid under NMAR (ignorability fails)", stacklevel=2)

    t0 = time.perf_counter()
    tasks = [(cfg, ri, pi, rep)
             for ri in range(len(cfg.ranks))
             for pi in range(len(cfg.missing_props))
             for rep in range(cfg.n_reps)]
    threads = cfg.threads if cfg.threads > 0 else (os.cpu_count() or 1)
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            raw = list(pool.map(_replication_star, tasks, chunksize=1))
    else:
        raw = [_replication(*t) for t in tasks]

    results = {(ri, pi, rep): (errs, chk) for ri, pi, rep, errs, chk in raw}
    cells = []
    p_values = []
    provenance = []
    for ri, rank in enumerate(cfg.ranks):
        for pi, p in enumerate(cfg.missing_props):
            per_mech = {mech: [] for mech in cfg.mechanisms}
            for rep in range(cfg.n_reps):
                errs, chk = results[(ri, pi, rep)]
                for mech, e in zip(cfg.mechanisms, errs):
                    per_mech[mech].append(e)
                provenance.append({
                    "rank": rank, "missing_prop": p, "rep": rep,
                    "seed_key": [cfg.master_seed, ri, pi, rep],
                    "y_checksum": chk,
                })
            for mech in cfg.mechanisms:
                cells.append(summarize_cell(per_mech[mech], mechanism=mech,
                                            rank=rank, missing_prop=p))
            if len(cfg.mechanisms) == 2 and cfg.n_reps >= 2:
                xs, ys = (per_mech[m] for m in cfg.mechanisms)
                test = paired_t_test if cfg.paired_test else welch_t_test
                try:
                    t, df, pv = test(xs, ys)
                except ParameterError:
                    t, df, pv = float("nan"), float("nan"), float("nan")
                p_values.append({"rank": rank, "missing_prop": p,
                                 "t": t, "df": df, "p": pv})
    return BenchReport(config=cfg, cells=tuple(cells), p_values=tuple(p_values),
                       provenance=tuple(provenance),
                       wall_clock_s=time.perf_counter() - t0,
                       version=__version__)


def _cell_p_value(report: BenchReport, cell: CellSummary) -> float | None:
    for entry in report.p_values:
        if entry["rank"] == cell.rank and entry["missing_prop"] == cell.missing_prop:
            return entry["p"]
    return None


def _fmt6(x) -> str:
    return format(float(x), ".6g")


def render_table(report: BenchReport, fmt: str = "ascii") -> str:
    """Render a report as an ASCII table, CSV, or JSON."""
    if fmt == "csv":
        return _render_csv(report)
    if fmt == "json":
        return _render_json(report)
    if fmt == "ascii":
        return _render_ascii(report)
    raise ParameterError(f"unknown output format {fmt!r}")


def _render_csv(report: BenchReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["rank", "missing_prop", "mechanism", "n_reps",
                     "mean_rel_err_pct", "sd_rel_err", "welch_p"])
    for cell in report.cells:
        pv = _cell_p_value(report, cell)
        writer.writerow([cell.rank, _fmt6(cell.missing_prop), cell.mechanism,
                         cell.n_reps, _fmt6(cell.mean_rel_err),
                         _fmt6(cell.sd_rel_err),
                         "" if pv is None else _fmt6(pv)])
    return buf.getvalue()


def parse_csv(text: str) -> list[dict]:
    """Parse a benchmark CSV back into per-cell dicts (round-trip helper)."""
    rows = []
    for row in csv.DictReader(io.StringIO(text)):
        rows.append({
            "rank": int(row["rank"]),
            "missing_prop": float(row["missing_prop"]),
            "mechanism": row["mechanism"],
            "n_reps": int(row["n_reps"]),
            "mean_rel_err_pct": float(row["mean_rel_err_pct"]),
            "sd_rel_err": float(row["sd_rel_err"]),
            "welch_p": float(row["welch_p"]) if row["welch_p"] else None,
        })
    return rows


def _render_json(report: BenchReport) -> str:
    payload = {
        "config": asdict(report.config),
        "cells": [asdict(c) for c in report.cells],
        "p_values": list(report.p_values),
        "provenance": list(report.provenance),
        "wall_clock_s": report.wall_clock_s,
        "version": report.version,
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _render_ascii(report: BenchReport) -> str:
    cfg = report.config
    props = list(cfg.missing_props)
    header = ["Rank", "Mechanism"] + [f"{100 * p:g}%" for p in props]
    rows = []
    for rank in cfg.ranks:
        for mech in cfg.mechanisms:
            vals = []
            for p in props:
                cell = next(c for c in report.cells
                            if c.rank == rank and c.mechanism == mech
                            and c.missing_prop == p)
                vals.append(f"{cell.mean_rel_err:.4f}")
            rows.append([str(rank), mech] + vals)
    widths = [max(len(header[j]), *(len(r[j]) for r in rows))
              for j in range(len(header))]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    for r in rows:
        lines.append("  ".join(v.rjust(w) for v, w in zip(r, widths)))
    if report.p_values:
        lines.append("")
        kind = "paired t" if cfg.paired_test else "Welch"
        lines.append(f"{kind} p-values ({cfg.mechanisms[0]} vs {cfg.mechanisms[1]}):")
        for rank in cfg.ranks:
            vals = [f"{e['p']:.4f}" for e in report.p_values if e["rank"] == rank]
            lines.append("  ".join([str(rank).rjust(widths[0])] + vals))
    lines.append(f"\nreps={cfg.n_reps}  scope={cfg.error_scope}  "
                 f"seed={cfg.master_seed}  wall={report.wall_clock_s:.1f}s")
    return "\n".join(lines) + "\n"
