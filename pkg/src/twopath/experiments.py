"""Parameter-sweep harness: generate networks, run a mechanism, emit CSV.

One experiment sweeps exactly one generator parameter.  Every random stream
derives from (master seed, point index, graph index, run index) through a
stable hash, so results are independent of scheduling and worker count, and
a fixed master seed reproduces the CSV byte for byte (wall_ms aside).
"""

from __future__ import annotations

import hashlib
import struct
import time
from dataclasses import dataclass
from multiprocessing import Pool
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import InvalidParams
from .graphs import DiGraph, is_dag
from .influence import influence_dag_float, influence_montecarlo
from .mechanisms import (
    Mechanism,
    analytic_two_path_distribution,
    run_two_path,
    sample_analytic,
    select_general_two_path,
)
from .generators import BaDagParams, PqrParams, gen_ba_dag, gen_pqr

CSV_HEADER = "param,mean_ratio,p10,p50,p90,null_rate,n,graphs,runs,seed,wall_ms"
INCOMPLETE_MARKER = "# incomplete"

CYCLIC_ISTAR_TRIALS_PER_VERTEX = 200
ARGMAX_STABILITY_RANK = 3


class RowAborted(RuntimeError):
    """A sweep row could not produce a trustworthy maximal influence."""


def derive_seed(*parts: int) -> int:
    """Stable 63-bit stream seed from a tuple of indices."""
    payload = struct.pack(f"<{len(parts)}q", *parts)
    digest = hashlib.blake2b(payload, digest_size=8).digest()
    return int.from_bytes(digest, "little") >> 1


@dataclass(frozen=True)
class ExperimentSpec:
    """One swept axis over a generator, with a mechanism to evaluate."""

    model: str  # "ba-dag" or "pqr"
    mechanism: Mechanism
    sweep_param: str
    sweep_values: tuple
    fixed: dict
    graphs_per_point: int = 100
    runs_per_graph: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.model not in ("ba-dag", "pqr"):
            raise InvalidParams(f"unknown model {self.model!r}")
        if not self.sweep_values:
            raise InvalidParams("sweep needs at least one value")
        if self.sweep_param in self.fixed:
            raise InvalidParams(f"{self.sweep_param!r} is both swept and fixed")
        if self.graphs_per_point < 1 or self.runs_per_graph < 1:
            raise InvalidParams("counts must be >= 1")
        allowed = {"ba-dag": {"n", "sinks", "k"}, "pqr": {"n", "avg_degree", "q_hat"}}[
            self.model
        ]
        names = set(self.fixed) | {self.sweep_param}
        if names != allowed:
            raise InvalidParams(f"model {self.model} needs params {sorted(allowed)}")


@dataclass(frozen=True)
class ExperimentRow:
    param: float
    mean_ratio: float
    p10: float
    p50: float
    p90: float
    null_rate: float
    n: int
    graphs: int
    runs: int
    seed: int
    wall_ms: float


def _sig6(x: float) -> str:
    return f"{x:.6g}"


def row_to_csv(row: ExperimentRow) -> str:
    return ",".join(
        [
            _sig6(row.param),
            _sig6(row.mean_ratio),
            _sig6(row.p10),
            _sig6(row.p50),
            _sig6(row.p90),
            _sig6(row.null_rate),
            str(row.n),
            str(row.graphs),
            str(row.runs),
            str(row.seed),
            _sig6(row.wall_ms),
        ]
    )


def pqr_params_from(n: int, avg_degree: float, q_hat: float, seed: int) -> PqrParams:
    """Convert the sweep knobs to event probabilities.

    avg_degree = 1/(p+q) is the expected average in-degree and q_hat =
    q/(p+q) the reverse-edge share, so p+q = 1/avg_degree, q = q_hat/avg_degree,
    and the rest of the mass goes to edge events.
    """
    if avg_degree < 1:
        raise InvalidParams("avg_degree must be >= 1")
    if not 0 <= q_hat < 1:
        raise InvalidParams("q_hat must be in [0, 1)")
    pq = 1.0 / avg_degree
    q = q_hat * pq
    p = pq - q
    r = 1.0 - pq
    return PqrParams(n_total=n, p=p, q=q, r=r, seed=seed, allow_q_ge_p=q_hat >= 0.5)


def _generate(model: str, params: dict, seed: int) -> DiGraph:
    if model == "ba-dag":
        return gen_ba_dag(
            BaDagParams(
                n_total=int(params["n"]),
                s=int(params["sinks"]),
                k=int(params["k"]),
                seed=seed,
            )
        )
    return gen_pqr(
        pqr_params_from(
            int(params["n"]), float(params["avg_degree"]), float(params["q_hat"]), seed
        )
    )


def _mc_influence_halves(g: DiGraph, seed: int) -> tuple[np.ndarray, np.ndarray]:
    half = (CYCLIC_ISTAR_TRIALS_PER_VERTEX // 2) * g.n
    a = influence_montecarlo(g, half, derive_seed(seed, 1)).table
    b = influence_montecarlo(g, half, derive_seed(seed, 2)).table
    return np.asarray(a.as_floats()), np.asarray(b.as_floats())


def _check_argmax_stability(ta: np.ndarray, tb: np.ndarray) -> None:
    rank_in_b = int((tb > tb[int(ta.argmax())]).sum())
    rank_in_a = int((ta > ta[int(tb.argmax())]).sum())
    if rank_in_b >= ARGMAX_STABILITY_RANK or rank_in_a >= ARGMAX_STABILITY_RANK:
        raise RowAborted(
            f"unstable maximal-influence estimate: argmax ranks {rank_in_a}, {rank_in_b}"
        )


def estimate_istar_cyclic(g: DiGraph, seed: int) -> float:
    """Maximal influence on a cyclic graph from two independent Monte Carlo
    halves with an argmax stability cross-check.

    Each half runs 100n trials.  The top vertex of either half must appear
    within the top ARGMAX_STABILITY_RANK vertices of the other, otherwise the
    estimate is untrustworthy and the row is aborted with a diagnostic.
    """
    ta, tb = _mc_influence_halves(g, seed)
    _check_argmax_stability(ta, tb)
    return float(np.maximum(ta, tb).max())


def _run_graph(
    model: str,
    params: dict,
    mechanism: Mechanism,
    master_seed: int,
    point_index: int,
    graph_index: int,
    runs: int,
) -> tuple[float, int]:
    """One generated network: returns (ratio I*/E, null count)."""
    import random as _random

    gseed = derive_seed(master_seed, point_index, graph_index)
    g = _generate(model, params, gseed)
    if is_dag(g):
        inf = influence_dag_float(g)
        istar = float(inf.i_star())
        scores = inf.totals
    else:
        # exact influence is unavailable on cyclic graphs; both the maximal
        # influence and the selection scores come from the same two-half
        # Monte Carlo estimate, comparing like with like
        ta, tb = _mc_influence_halves(g, gseed)
        _check_argmax_stability(ta, tb)
        combined = (ta + tb) / 2.0
        istar = float(combined.max())
        scores = combined
    dist = None
    if mechanism is Mechanism.ANALYTIC:
        dist = analytic_two_path_distribution(g)
    total = 0.0
    nulls = 0
    for run_index in range(runs):
        rng = _random.Random(derive_seed(master_seed, point_index, graph_index, run_index))
        if mechanism is Mechanism.TWO_PATH:
            chosen = run_two_path(g, rng, record=False).outcome.vertex
        elif mechanism is Mechanism.GENERAL_TWO_PATH:
            chosen, _ = select_general_two_path(g, rng)
        else:
            chosen = sample_analytic(g, rng, dist).vertex
        if chosen is None:
            nulls += 1
        else:
            total += float(scores[chosen])
    mean = total / runs
    ratio = istar / mean if mean > 0 else float("inf")
    return ratio, nulls


def _job(args) -> tuple[int, float, int]:
    (model, params, mechanism, seed, pi, gi, runs) = args
    ratio, nulls = _run_graph(model, params, mechanism, seed, pi, gi, runs)
    return gi, ratio, nulls


def run_experiment(
    spec: ExperimentSpec,
    threads: int = 1,
    out_path: Optional[str | Path] = None,
    progress=None,
) -> list[ExperimentRow]:
    """Execute the sweep, streaming rows to CSV when a path is given.

    While rows are being written the file starts with an incomplete marker
    comment; on success the file is rewritten without it.
    """
    rows: list[ExperimentRow] = []
    handle = None
    if out_path is not None:
        handle = open(out_path, "w", newline="\n")
        handle.write(INCOMPLETE_MARKER + "\n" + CSV_HEADER + "\n")
        handle.flush()
    try:
        for pi, value in enumerate(spec.sweep_values):
            start = time.perf_counter()
            params = dict(spec.fixed)
            params[spec.sweep_param] = value
            jobs = [
                (spec.model, params, spec.mechanism, spec.seed, pi, gi, spec.runs_per_graph)
                for gi in range(spec.graphs_per_point)
            ]
            if threads > 1:
                with Pool(threads) as pool:
                    results = pool.map(_job, jobs)
            else:
                results = [_job(j) for j in jobs]
            ratios = np.array([r for _, r, _ in results], dtype=float)
            nulls = sum(c for _, _, c in results)
            wall_ms = (time.perf_counter() - start) * 1000.0
            p10, p50, p90 = (float(x) for x in np.percentile(ratios, [10, 50, 90]))
            row = ExperimentRow(
                param=float(value),
                mean_ratio=float(ratios.mean()),
                p10=p10,
                p50=p50,
                p90=p90,
                null_rate=nulls / (spec.graphs_per_point * spec.runs_per_graph),
                n=int(params["n"]),
                graphs=spec.graphs_per_point,
                runs=spec.runs_per_graph,
                seed=spec.seed,
                wall_ms=wall_ms,
            )
            rows.append(row)
            if handle is not None:
                handle.write(row_to_csv(row) + "\n")
                handle.flush()
            if progress is not None:
                progress(row)
    finally:
        if handle is not None:
            handle.close()
    if out_path is not None:
        text = CSV_HEADER + "\n" + "".join(row_to_csv(r) + "\n" for r in rows)
        Path(out_path).write_text(text, newline="\n")
    return rows


def read_experiment_csv(path: str | Path) -> tuple[list[dict], bool]:
    """Parse an experiment CSV; returns (rows as dicts, complete flag)."""
    complete = True
    header: list[str] | None = None
    rows: list[dict] = []
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line == INCOMPLETE_MARKER:
                complete = False
            continue
        if header is None:
            header = line.split(",")
            if header != CSV_HEADER.split(","):
                raise ValueError(f"unexpected CSV header: {line!r}")
            continue
        values = line.split(",")
        row = dict(zip(header, values))
        rows.append(row)
    if header is None:
        raise ValueError("no CSV header found")
    return rows, complete
