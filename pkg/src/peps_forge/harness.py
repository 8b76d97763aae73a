"""Configuration ingestion, instance generation, sweeps and reporting.

Configuration documents are JSON with a fixed schema (see README). Complex
matrix entries are ``[re, im]`` pairs and matrices are nested row-major
lists; every vertex's virtual column layout is pinned by an explicit
``edge_order`` listing (ascending neighbor ids), so tensor files are
unambiguous, diffable fixtures.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from scipy import stats

from .dynamics import (
    PreparedInstance,
    RunReport,
    cost_model_for_graph,
    markov_exact_distribution,
    repair_loop_trials,
    run_algorithm,
)
from .errors import ConfigError, InvalidInputError
from .linalg import ZERO_TOL
from .network import InteractionGraph, PepsTensor, canonicalize

TOPOLOGIES = ("chain", "ring", "grid", "custom")
TENSOR_SOURCES = ("random", "explicit")
MODES = ("bounded", "until_success")


# ---------------------------------------------------------------------------
# configuration schema
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GraphSpec:
    """Named topology or explicit edge list."""

    topology: str
    length: int | None = None
    rows: int | None = None
    cols: int | None = None
    num_vertices: int | None = None
    edges: tuple[tuple[int, int], ...] | None = None


@dataclass(frozen=True)
class TensorSpec:
    """Where vertex maps come from: seeded random sampling or explicit entries.

    ``entries`` stores one matrix per vertex as nested tuples of
    ``(re, im)`` pairs; ``edge_order`` pins each vertex's virtual column
    layout as the list of neighbor ids in register order.
    """

    source: str
    kappa_max: float | None = None
    physical_dims: tuple[int, ...] | None = None
    seed: int | None = None
    entries: tuple | None = None
    edge_order: tuple[tuple[int, ...], ...] | None = None


@dataclass(frozen=True)
class InstanceConfig:
    """One experiment: graph, tensors, failure budget and seeds."""

    graph: GraphSpec
    bond_dim: int
    tensors: TensorSpec
    seed: int
    order: tuple[int, ...] | None = None
    eps: float = 0.1
    c: float = 1.0
    zero_tol: float = ZERO_TOL


def _require(doc: dict, key: str, where: str):
    if key not in doc:
        raise ConfigError(f"{where}/{key}", "missing required field")
    return doc[key]


def _check_keys(doc: dict, allowed: set[str], where: str) -> None:
    for key in doc:
        if key not in allowed:
            raise ConfigError(f"{where}/{key}", "unknown field")


def _as_int(value, where: str, minimum: int | None = None) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise ConfigError(where, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(where, f"must be >= {minimum}, got {value}")
    return value


def _as_number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(where, f"expected a number, got {value!r}")
    return float(value)


def _parse_graph(doc, where: str = "/graph") -> GraphSpec:
    if not isinstance(doc, dict):
        raise ConfigError(where, "expected an object")
    topology = _require(doc, "topology", where)
    if topology not in TOPOLOGIES:
        raise ConfigError(f"{where}/topology", f"must be one of {TOPOLOGIES}")
    if topology in ("chain", "ring"):
        _check_keys(doc, {"topology", "length"}, where)
        length = _as_int(_require(doc, "length", where), f"{where}/length", 2)
        if topology == "ring" and length < 3:
            raise ConfigError(f"{where}/length", "a ring needs at least 3 vertices")
        return GraphSpec(topology=topology, length=length)
    if topology == "grid":
        _check_keys(doc, {"topology", "rows", "cols"}, where)
        rows = _as_int(_require(doc, "rows", where), f"{where}/rows", 1)
        cols = _as_int(_require(doc, "cols", where), f"{where}/cols", 1)
        if rows * cols < 2:
            raise ConfigError(where, "a grid needs at least 2 vertices")
        return GraphSpec(topology="grid", rows=rows, cols=cols)
    _check_keys(doc, {"topology", "num_vertices", "edges"}, where)
    n = _as_int(_require(doc, "num_vertices", where), f"{where}/num_vertices", 2)
    edges_doc = _require(doc, "edges", where)
    if not isinstance(edges_doc, list) or not edges_doc:
        raise ConfigError(f"{where}/edges", "expected a non-empty list of pairs")
    edges = []
    for i, pair in enumerate(edges_doc):
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(x, int) and not isinstance(x, bool) for x in pair)
        ):
            raise ConfigError(f"{where}/edges/{i}", f"expected [u, v], got {pair!r}")
        edges.append((min(pair), max(pair)))
    return GraphSpec(topology="custom", num_vertices=n, edges=tuple(edges))


def _parse_tensors(doc, where: str = "/tensors") -> TensorSpec:
    if not isinstance(doc, dict):
        raise ConfigError(where, "expected an object")
    source = _require(doc, "source", where)
    if source not in TENSOR_SOURCES:
        raise ConfigError(f"{where}/source", f"must be one of {TENSOR_SOURCES}")
    if source == "random":
        _check_keys(doc, {"source", "kappa_max", "physical_dims", "seed"}, where)
        kappa_max = _as_number(_require(doc, "kappa_max", where), f"{where}/kappa_max")
        if kappa_max < 1.0:
            raise ConfigError(f"{where}/kappa_max", f"must be >= 1, got {kappa_max}")
        seed = _as_int(_require(doc, "seed", where), f"{where}/seed", 0)
        dims = doc.get("physical_dims")
        if dims is not None:
            if not isinstance(dims, list):
                raise ConfigError(f"{where}/physical_dims", "expected a list or null")
            dims = tuple(
                _as_int(d, f"{where}/physical_dims/{i}", 1) for i, d in enumerate(dims)
            )
        return TensorSpec(
            source="random", kappa_max=kappa_max, physical_dims=dims, seed=seed
        )
    _check_keys(doc, {"source", "entries", "edge_order"}, where)
    entries_doc = _require(doc, "entries", where)
    if not isinstance(entries_doc, list) or not entries_doc:
        raise ConfigError(f"{where}/entries", "expected one matrix per vertex")
    entries = []
    for v, matrix in enumerate(entries_doc):
        here = f"{where}/entries/{v}"
        if not isinstance(matrix, list) or not matrix:
            raise ConfigError(here, "expected a non-empty list of rows")
        rows = []
        width = None
        for i, row in enumerate(matrix):
            if not isinstance(row, list) or not row:
                raise ConfigError(f"{here}/{i}", "expected a non-empty row")
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise ConfigError(f"{here}/{i}", "ragged matrix rows")
            cells = []
            for j, cell in enumerate(row):
                if (
                    not isinstance(cell, list)
                    or len(cell) != 2
                    or not all(
                        isinstance(x, (int, float)) and not isinstance(x, bool)
                        for x in cell
                    )
                ):
                    raise ConfigError(f"{here}/{i}/{j}", f"expected [re, im], got {cell!r}")
                cells.append((float(cell[0]), float(cell[1])))
            rows.append(tuple(cells))
        entries.append(tuple(rows))
    edge_order_doc = _require(doc, "edge_order", where)
    if not isinstance(edge_order_doc, list) or len(edge_order_doc) != len(entries):
        raise ConfigError(f"{where}/edge_order", "expected one neighbor list per vertex")
    edge_order = []
    for v, lst in enumerate(edge_order_doc):
        if not isinstance(lst, list) or not all(
            isinstance(x, int) and not isinstance(x, bool) for x in lst
        ):
            raise ConfigError(f"{where}/edge_order/{v}", "expected a list of vertex ids")
        edge_order.append(tuple(lst))
    return TensorSpec(
        source="explicit", entries=tuple(entries), edge_order=tuple(edge_order)
    )


def parse_config(doc: dict) -> InstanceConfig:
    """Validate a configuration document and build an :class:`InstanceConfig`.

    Errors carry a JSON-pointer-style location of the offending field.
    """
    if not isinstance(doc, dict):
        raise ConfigError("", "expected a JSON object")
    _check_keys(
        doc,
        {"graph", "bond_dim", "tensors", "seed", "order", "eps", "c", "tolerances"},
        "",
    )
    graph = _parse_graph(_require(doc, "graph", ""))
    bond_dim = _as_int(_require(doc, "bond_dim", ""), "/bond_dim", 2)
    tensors = _parse_tensors(_require(doc, "tensors", ""))
    seed = _as_int(_require(doc, "seed", ""), "/seed", 0)
    order = None
    if doc.get("order") is not None:
        if not isinstance(doc["order"], list):
            raise ConfigError("/order", "expected a list of vertex ids")
        order = tuple(
            _as_int(v, f"/order/{i}", 0) for i, v in enumerate(doc["order"])
        )
    eps = _as_number(doc.get("eps", 0.1), "/eps")
    if not 0.0 < eps < 1.0:
        raise ConfigError("/eps", f"must be in (0, 1), got {eps}")
    c = _as_number(doc.get("c", 1.0), "/c")
    if c <= 0.0:
        raise ConfigError("/c", f"must be positive, got {c}")
    zero_tol = ZERO_TOL
    if "tolerances" in doc:
        tol_doc = doc["tolerances"]
        if not isinstance(tol_doc, dict):
            raise ConfigError("/tolerances", "expected an object")
        _check_keys(tol_doc, {"zero_tol"}, "/tolerances")
        if "zero_tol" in tol_doc:
            zero_tol = _as_number(tol_doc["zero_tol"], "/tolerances/zero_tol")
            if zero_tol <= 0.0:
                raise ConfigError("/tolerances/zero_tol", "must be positive")
    return InstanceConfig(
        graph=graph,
        bond_dim=bond_dim,
        tensors=tensors,
        seed=seed,
        order=order,
        eps=eps,
        c=c,
        zero_tol=zero_tol,
    )


def config_to_dict(cfg: InstanceConfig) -> dict:
    """Serialize a config back to its schema document (lossless round trip)."""
    graph: dict = {"topology": cfg.graph.topology}
    if cfg.graph.topology in ("chain", "ring"):
        graph["length"] = cfg.graph.length
    elif cfg.graph.topology == "grid":
        graph["rows"] = cfg.graph.rows
        graph["cols"] = cfg.graph.cols
    else:
        graph["num_vertices"] = cfg.graph.num_vertices
        graph["edges"] = [list(e) for e in cfg.graph.edges]
    if cfg.tensors.source == "random":
        tensors: dict = {
            "source": "random",
            "kappa_max": cfg.tensors.kappa_max,
            "physical_dims": (
                list(cfg.tensors.physical_dims)
                if cfg.tensors.physical_dims is not None
                else None
            ),
            "seed": cfg.tensors.seed,
        }
    else:
        tensors = {
            "source": "explicit",
            "entries": [
                [[[re, im] for re, im in row] for row in matrix]
                for matrix in cfg.tensors.entries
            ],
            "edge_order": [list(o) for o in cfg.tensors.edge_order],
        }
    return {
        "graph": graph,
        "bond_dim": cfg.bond_dim,
        "tensors": tensors,
        "seed": cfg.seed,
        "order": list(cfg.order) if cfg.order is not None else None,
        "eps": cfg.eps,
        "c": cfg.c,
        "tolerances": {"zero_tol": cfg.zero_tol},
    }


def load_config(path: str | Path) -> InstanceConfig:
    """Read a config file; fixture documents (config + expected) are unwrapped."""
    with open(path, encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as exc:
            raise ConfigError("", f"not valid JSON: {exc}") from exc
    if isinstance(doc, dict) and "graph" not in doc and isinstance(doc.get("config"), dict):
        doc = doc["config"]
    return parse_config(doc)


def instance_label(cfg: InstanceConfig) -> str:
    """Short deterministic label for reports and CSV rows."""
    g = cfg.graph
    if g.topology in ("chain", "ring"):
        shape = f"{g.topology}{g.length}"
    elif g.topology == "grid":
        shape = f"grid{g.rows}x{g.cols}"
    else:
        shape = f"custom{g.num_vertices}v{len(g.edges)}e"
    return f"{shape}-D{cfg.bond_dim}-{cfg.tensors.source}"


# ---------------------------------------------------------------------------
# instance construction
# ---------------------------------------------------------------------------


def topology_edges(spec: GraphSpec) -> tuple[int, list[tuple[int, int]]]:
    """Vertex count and edge list of a graph spec."""
    if spec.topology == "chain":
        n = spec.length
        return n, [(i, i + 1) for i in range(n - 1)]
    if spec.topology == "ring":
        n = spec.length
        return n, [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)]
    if spec.topology == "grid":
        rows, cols = spec.rows, spec.cols
        n = rows * cols
        edges = []
        for r in range(rows):
            for col in range(cols):
                v = r * cols + col
                if col + 1 < cols:
                    edges.append((v, v + 1))
                if r + 1 < rows:
                    edges.append((v, v + cols))
        return n, edges
    return spec.num_vertices, list(spec.edges)


def _haar_isometry(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    q, r = np.linalg.qr(z)
    phases = np.diagonal(r).copy()
    phases /= np.abs(phases)
    return q * phases.conj()


def random_injective_matrix(
    phys_dim: int, virt_dim: int, kappa_max: float, rng: np.random.Generator
) -> np.ndarray:
    """Random injective map with condition number at most ``kappa_max``.

    Singular values are sampled uniformly in ``[1/kappa_max, 1]`` and dressed
    with independent Haar isometric factors; ``kappa_max = 1`` yields an
    exact isometry.
    """
    if phys_dim < virt_dim:
        raise InvalidInputError(
            f"physical dimension {phys_dim} below virtual dimension {virt_dim}"
        )
    if kappa_max < 1.0:
        raise InvalidInputError(f"kappa_max must be >= 1, got {kappa_max}")
    if kappa_max == 1.0:
        sigmas = np.ones(virt_dim)
    else:
        sigmas = rng.uniform(1.0 / kappa_max, 1.0, size=virt_dim)
    left = _haar_isometry(phys_dim, virt_dim, rng)
    right = _haar_isometry(virt_dim, virt_dim, rng)
    return (left * sigmas) @ right.conj().T


def generate_random_injective(
    phys_dim: int,
    bond_dim: int,
    degree: int,
    kappa_max: float,
    rng: np.random.Generator,
    vertex: int = 0,
) -> PepsTensor:
    """Sample one canonicalized injective vertex map for a degree-``k`` vertex."""
    return canonicalize(
        vertex, random_injective_matrix(phys_dim, bond_dim**degree, kappa_max, rng)
    )


def _tensor_rng(seed: int, vertex: int) -> np.random.Generator:
    # spawn-key namespace 1 = tensor generation (0 = measurement streams)
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(1, vertex)))


def build_instance(cfg: InstanceConfig) -> tuple[InteractionGraph, list[PepsTensor]]:
    """Materialize the graph and canonicalized tensors of a configuration."""
    n, edges = topology_edges(cfg.graph)
    if cfg.tensors.source == "random":
        dims = cfg.tensors.physical_dims
        if dims is not None and len(dims) != n:
            raise ConfigError(
                "/tensors/physical_dims", f"expected {n} entries, got {len(dims)}"
            )
        graph = InteractionGraph.build(
            n,
            edges,
            bond_dim=cfg.bond_dim,
            physical_dims=list(dims) if dims is not None else None,
            order=list(cfg.order) if cfg.order is not None else None,
        )
        tensors = []
        for v in range(n):
            matrix = random_injective_matrix(
                graph.physical_dims[v],
                graph.register_dim(v),
                cfg.tensors.kappa_max,
                _tensor_rng(cfg.tensors.seed, v),
            )
            tensors.append(canonicalize(v, matrix))
        return graph, tensors
    entries = cfg.tensors.entries
    if len(entries) != n:
        raise ConfigError("/tensors/entries", f"expected {n} matrices, got {len(entries)}")
    matrices = [
        np.array([[complex(re, im) for re, im in row] for row in matrix])
        for matrix in entries
    ]
    graph = InteractionGraph.build(
        n,
        edges,
        bond_dim=cfg.bond_dim,
        physical_dims=[m.shape[0] for m in matrices],
        order=list(cfg.order) if cfg.order is not None else None,
    )
    for v, m in enumerate(matrices):
        expected_cols = graph.register_dim(v)
        if m.shape[1] != expected_cols:
            raise ConfigError(
                f"/tensors/entries/{v}",
                f"matrix has {m.shape[1]} columns, register needs {expected_cols}",
            )
        declared = cfg.tensors.edge_order[v]
        actual = tuple(
            g_neighbor(graph, v, eid) for eid in graph.incident_edges(v)
        )
        if declared != actual:
            raise ConfigError(
                f"/tensors/edge_order/{v}",
                f"declared neighbor order {declared} does not match the "
                f"register convention {actual} (ascending neighbor ids)",
            )
    return graph, [canonicalize(v, m) for v, m in enumerate(matrices)]


def g_neighbor(graph: InteractionGraph, v: int, edge_id: int) -> int:
    u, w = graph.edges[edge_id]
    return w if u == v else u


def to_explicit_config(
    cfg: InstanceConfig, graph: InteractionGraph, tensors: list[PepsTensor]
) -> InstanceConfig:
    """Pin a built instance into an explicit-entries configuration.

    The resulting config reproduces the instance bit-exactly without any
    random sampling, which is how fixtures are frozen.
    """
    entries = tuple(
        tuple(
            tuple((float(x.real), float(x.imag)) for x in row)
            for row in tensors[v].matrix
        )
        for v in range(graph.num_vertices)
    )
    edge_order = tuple(tuple(o) for o in edge_order_of(graph))
    spec = TensorSpec(source="explicit", entries=entries, edge_order=edge_order)
    return InstanceConfig(
        graph=cfg.graph,
        bond_dim=cfg.bond_dim,
        tensors=spec,
        seed=cfg.seed,
        order=cfg.order,
        eps=cfg.eps,
        c=cfg.c,
        zero_tol=cfg.zero_tol,
    )


def edge_order_of(graph: InteractionGraph) -> list[list[int]]:
    """Per-vertex neighbor lists in register (ascending) order."""
    return [
        [g_neighbor(graph, v, eid) for eid in graph.incident_edges(v)]
        for v in range(graph.num_vertices)
    ]


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


def report_to_dict(report: RunReport) -> dict:
    """JSON-ready dictionary of a run report."""
    return asdict(report)


def report_to_json(report: RunReport) -> str:
    """Canonical JSON text; identical inputs give byte-identical output."""
    return json.dumps(report_to_dict(report), sort_keys=True, indent=2)


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    """One trial of a sweep; reproducible bit-exactly from (config, seed)."""

    instance: str
    seed: int
    success: bool
    fidelity: float | None
    total_measurements: int
    measurement_bound: float
    bound_margin: float
    kappa: float
    min_gap: float
    overlaps: tuple[float, ...]
    gaps: tuple[float, ...]


@dataclass(frozen=True)
class SweepResult:
    instance: str
    mode: str
    eps: float
    trials: int
    rows: tuple[SweepRow, ...]
    summary: dict


def sweep(
    cfg: InstanceConfig,
    trials: int,
    base_seed: int | None = None,
    mode: str = "bounded",
    jobs: int = 1,
) -> SweepResult:
    """Run one instance across consecutive seeds and aggregate statistics.

    Trial ``i`` uses seed ``base_seed + i`` (default base: the config seed),
    so any row can be reproduced with a single ``run`` at its listed seed.
    Trials are independent; with ``jobs > 1`` they execute on a thread pool
    and the rows are sorted afterwards, so the output does not depend on
    scheduling.
    """
    if trials < 1:
        raise InvalidInputError("trials must be >= 1")
    if mode not in MODES:
        raise InvalidInputError(f"unknown mode {mode!r}")
    graph, tensors = build_instance(cfg)
    prepared = PreparedInstance(graph, tensors, c=cfg.c, zero_tol=cfg.zero_tol)
    label = instance_label(cfg)
    start = cfg.seed if base_seed is None else base_seed
    bounds = cost_model_for_graph(graph, prepared.kappa_max, cfg.eps, prepared.min_gap)

    def one(seed: int) -> SweepRow:
        report = run_algorithm(prepared, cfg.eps, seed, mode=mode)
        return SweepRow(
            instance=label,
            seed=seed,
            success=report.success,
            fidelity=report.fidelity,
            total_measurements=report.total_measurements,
            measurement_bound=bounds.measurement_bound,
            bound_margin=bounds.measurement_bound - report.total_measurements,
            kappa=prepared.kappa_max,
            min_gap=prepared.min_gap,
            overlaps=tuple(prepared.overlaps),
            gaps=tuple(prepared.gaps),
        )

    seeds = [start + i for i in range(trials)]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(one, seeds))
    else:
        rows = [one(s) for s in seeds]
    rows.sort(key=lambda r: (r.instance, r.seed))
    successes = sum(r.success for r in rows)
    rate = successes / trials
    stderr = math.sqrt(max(rate * (1.0 - rate), 1e-12) / trials)
    summary = {
        "instance": label,
        "mode": mode,
        "eps": cfg.eps,
        "trials": trials,
        "successes": successes,
        "success_rate": rate,
        "success_rate_stderr": stderr,
        "mean_measurements": float(np.mean([r.total_measurements for r in rows])),
        "max_measurements": int(max(r.total_measurements for r in rows)),
        "measurement_bound": bounds.measurement_bound,
        "all_within_bound": all(r.bound_margin >= 0 for r in rows),
        "kappa": prepared.kappa_max,
        "min_gap": prepared.min_gap,
    }
    return SweepResult(
        instance=label,
        mode=mode,
        eps=cfg.eps,
        trials=trials,
        rows=tuple(rows),
        summary=summary,
    )


def sweep_csv(result: SweepResult) -> str:
    """Stable long-format CSV, one row per trial.

    Columns: instance, seed, success, fidelity, total_measurements,
    measurement_bound, bound_margin, kappa, min_gap, then one ``p_step_t``
    column per processing step and one ``gap_step_t`` column per step
    Hamiltonian.
    """
    if not result.rows:
        raise InvalidInputError("empty sweep result")
    n_steps = len(result.rows[0].overlaps)
    n_gaps = len(result.rows[0].gaps)
    header = [
        "instance",
        "seed",
        "success",
        "fidelity",
        "total_measurements",
        "measurement_bound",
        "bound_margin",
        "kappa",
        "min_gap",
    ]
    header += [f"p_step_{t}" for t in range(n_steps)]
    header += [f"gap_step_{t}" for t in range(n_gaps)]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for r in result.rows:
        row = [
            r.instance,
            r.seed,
            int(r.success),
            "" if r.fidelity is None else repr(r.fidelity),
            r.total_measurements,
            repr(r.measurement_bound),
            repr(r.bound_margin),
            repr(r.kappa),
            repr(r.min_gap),
        ]
        row += [repr(p) for p in r.overlaps]
        row += [repr(g) for g in r.gaps]
        writer.writerow(row)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------


def chi_square_vs_markov(
    prepared: PreparedInstance,
    step: int,
    max_alternations: int,
    trials: int,
    seed: int,
    min_expected: float = 5.0,
) -> dict:
    """Goodness of fit of full-space repair statistics to the four-state chain.

    Bins trials by measurements used (with a separate bin for exhausted
    budgets), computes expected counts from the exact chain distribution at
    the step's overlap, merges sparse tail bins, and returns the chi-square
    p-value along with the binned counts.
    """
    p = prepared.overlaps[step]
    cats, probs = markov_exact_distribution(p, max_alternations)
    terminated, used = repair_loop_trials(
        prepared, step, max_alternations, trials, seed
    )
    observed = []
    for cat in cats:
        if cat == -1:
            observed.append(int(np.sum(~terminated)))
        else:
            observed.append(int(np.sum(terminated & (used == cat))))
    expected = probs * trials
    # merge the sparse tail into the last healthy bin
    obs_list, exp_list = list(observed), list(expected)
    while len(obs_list) > 2 and (exp_list[-1] < min_expected or exp_list[-2] < min_expected):
        obs_list[-2] += obs_list[-1]
        exp_list[-2] += exp_list[-1]
        del obs_list[-1], exp_list[-1]
    exp_arr = np.asarray(exp_list, dtype=float)
    exp_arr *= sum(obs_list) / exp_arr.sum()
    chi2, pvalue = stats.chisquare(np.asarray(obs_list, dtype=float), exp_arr)
    return {
        "overlap": p,
        "trials": trials,
        "bins": len(obs_list),
        "observed": obs_list,
        "expected": exp_arr.tolist(),
        "chi2": float(chi2),
        "pvalue": float(pvalue),
    }


def theorem_sweep_check(result: SweepResult, sigmas: float = 3.0) -> dict:
    """Success-probability and measurement-bound check on a bounded sweep.

    The empirical success fraction must be at least ``1 - eps`` minus
    ``sigmas`` binomial standard deviations (computed at ``1 - eps``), and
    every run must stay within the measurement bound.
    """
    eps = result.eps
    trials = result.trials
    sigma = math.sqrt(eps * (1.0 - eps) / trials)
    threshold = 1.0 - eps - sigmas * sigma
    rate = result.summary["success_rate"]
    return {
        "trials": trials,
        "eps": eps,
        "success_rate": rate,
        "threshold": threshold,
        "success_ok": rate >= threshold,
        "bound_ok": result.summary["all_within_bound"],
        "measurement_bound": result.summary["measurement_bound"],
        "max_measurements": result.summary["max_measurements"],
    }


# ---------------------------------------------------------------------------
# fixtures
# ---------------------------------------------------------------------------

FIXTURE_NAMES = ("chain2", "chain3", "chain4", "ring4", "grid2x2")


def fixture_path(name: str) -> Path:
    if name not in FIXTURE_NAMES:
        raise InvalidInputError(f"unknown fixture {name!r}; have {FIXTURE_NAMES}")
    return Path(__file__).parent / "fixtures" / f"{name}.json"


def load_fixture(name: str) -> tuple[InstanceConfig, dict]:
    """Load a shipped instance: (config, expected-values dict).

    Expected values (condition numbers, gaps, step overlaps) were computed
    by the contraction and diagonalization oracles at generation time and
    are pinned for regression checks.
    """
    with open(fixture_path(name), encoding="utf-8") as f:
        doc = json.load(f)
    return parse_config(doc["config"]), doc["expected"]
