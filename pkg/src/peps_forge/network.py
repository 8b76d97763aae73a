"""Tensor-network data model and brute-force contraction oracle.

A state is grown on an interaction graph: every edge carries a maximally
entangled pair of bond dimension ``D`` and every vertex carries a linear map
from its incident virtual factors to a physical space. The simulation runs
in the positive ("canonical") gauge: each vertex map is polar-decomposed as
``A = U @ P`` and only the positive factor ``P`` acts on the virtual
register, while the isometry ``U`` is remembered and re-applied at the very
end (:func:`restore_gauge`). In this gauge every vertex register keeps the
full virtual dimension throughout, which makes the intermediate states and
all overlap probabilities directly computable.

Register layout: vertex ``v``'s register is the tensor product of one
``D``-dimensional factor per incident edge, ordered by ascending neighbor
id. Global states flatten registers in vertex order, vertex 0 most
significant (see :mod:`peps_forge.linalg`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import linalg
from .errors import (
    BoundViolationError,
    GaugeRestoreError,
    InjectivityError,
    InvalidInputError,
)
from .limits import check_dim

#: unit-norm slack allowed on states returned by this module
NORM_TOL = 1e-10


@dataclass(frozen=True)
class InteractionGraph:
    """Undirected interaction graph with per-edge bond and per-vertex physical dims.

    Attributes:
        num_vertices: number of vertices, labeled ``0 .. num_vertices-1``.
        edges: unordered vertex pairs, stored as ``(min, max)``; the position
            in this tuple is the edge id.
        bond_dims: bond dimension per edge (same indexing as ``edges``).
        physical_dims: physical dimension per vertex; must be at least the
            product of incident bond dimensions (injectivity is impossible
            otherwise).
        order: total processing order, a permutation of the vertices.
    """

    num_vertices: int
    edges: tuple[tuple[int, int], ...]
    bond_dims: tuple[int, ...]
    physical_dims: tuple[int, ...]
    order: tuple[int, ...]

    def __post_init__(self) -> None:
        n = self.num_vertices
        if n < 2:
            raise InvalidInputError(f"need at least 2 vertices, got {n}")
        if not self.edges:
            raise InvalidInputError("need at least one edge")
        if len(self.bond_dims) != len(self.edges):
            raise InvalidInputError("bond_dims must have one entry per edge")
        if len(self.physical_dims) != n:
            raise InvalidInputError("physical_dims must have one entry per vertex")
        seen = set()
        for idx, (u, v) in enumerate(self.edges):
            if u == v:
                raise InvalidInputError(f"edge {idx} is a self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidInputError(f"edge {idx}=({u},{v}) references unknown vertices")
            if u > v:
                raise InvalidInputError(f"edge {idx}=({u},{v}) must be stored as (min,max)")
            if (u, v) in seen:
                raise InvalidInputError(f"duplicate edge ({u},{v})")
            seen.add((u, v))
        for idx, d in enumerate(self.bond_dims):
            if d < 2:
                raise InvalidInputError(f"bond dimension of edge {idx} must be >= 2, got {d}")
        if sorted(self.order) != list(range(n)):
            raise InvalidInputError(f"order {self.order} is not a permutation of 0..{n - 1}")
        for v in range(n):
            r = self.register_dim(v)
            if self.physical_dims[v] < r:
                raise InvalidInputError(
                    f"vertex {v}: physical dimension {self.physical_dims[v]} is below "
                    f"the virtual dimension {r}; injectivity is impossible"
                )

    @classmethod
    def build(
        cls,
        num_vertices: int,
        edges: list[tuple[int, int]] | tuple[tuple[int, int], ...],
        bond_dim: int | list[int] = 2,
        physical_dims: list[int] | None = None,
        order: list[int] | None = None,
    ) -> "InteractionGraph":
        """Convenience constructor that normalizes edges and fills defaults.

        With ``physical_dims=None`` each vertex gets the smallest physical
        dimension compatible with injectivity (the virtual dimension).
        """
        norm_edges = tuple((min(u, v), max(u, v)) for u, v in edges)
        if isinstance(bond_dim, int):
            bonds = tuple([bond_dim] * len(norm_edges))
        else:
            bonds = tuple(bond_dim)
        if order is None:
            order = list(range(num_vertices))
        if physical_dims is None:
            dims = []
            for v in range(num_vertices):
                r = 1
                for eid, (a, b) in enumerate(norm_edges):
                    if v in (a, b):
                        r *= bonds[eid]
                dims.append(r)
            physical_dims = dims
        return cls(
            num_vertices=num_vertices,
            edges=norm_edges,
            bond_dims=bonds,
            physical_dims=tuple(physical_dims),
            order=tuple(order),
        )

    def neighbors(self, v: int) -> tuple[int, ...]:
        out = []
        for u, w in self.edges:
            if u == v:
                out.append(w)
            elif w == v:
                out.append(u)
        return tuple(sorted(out))

    def degree(self, v: int) -> int:
        return len(self.incident_edges(v))

    @property
    def degree_bound(self) -> int:
        return max(self.degree(v) for v in range(self.num_vertices))

    def incident_edges(self, v: int) -> tuple[int, ...]:
        """Edge ids at ``v``, sorted by ascending neighbor id.

        This order defines the mixed-radix layout of the vertex register.
        """
        inc = []
        for eid, (u, w) in enumerate(self.edges):
            if u == v:
                inc.append((w, eid))
            elif w == v:
                inc.append((u, eid))
        inc.sort()
        return tuple(eid for _, eid in inc)

    def register_dim(self, v: int) -> int:
        return math.prod(self.bond_dims[e] for e in self.incident_edges(v))

    @cached_property
    def register_dims(self) -> tuple[int, ...]:
        return tuple(self.register_dim(v) for v in range(self.num_vertices))

    @cached_property
    def global_dim(self) -> int:
        return math.prod(self.register_dims)

    def factor_position(self, v: int, edge_id: int) -> int:
        """Position of ``edge_id`` inside vertex ``v``'s register layout."""
        inc = self.incident_edges(v)
        if edge_id not in inc:
            raise InvalidInputError(f"edge {edge_id} is not incident to vertex {v}")
        return inc.index(edge_id)

    def edge_id(self, u: int, v: int) -> int:
        pair = (min(u, v), max(u, v))
        try:
            return self.edges.index(pair)
        except ValueError as exc:
            raise InvalidInputError(f"no edge between {u} and {v}") from exc


@dataclass(frozen=True)
class PepsTensor:
    """A vertex map in polar form: ``matrix = isometry @ positive_factor``.

    ``matrix`` is the user-supplied map from the virtual register to the
    physical space (physical_dim x register_dim); the positive factor is what
    the canonical-gauge simulation applies, the isometry is replayed by
    :func:`restore_gauge`.
    """

    vertex: int
    matrix: np.ndarray
    isometry: np.ndarray
    positive_factor: np.ndarray
    singular_values: np.ndarray

    @property
    def kappa(self) -> float:
        return float(self.singular_values[0] / self.singular_values[-1])

    @property
    def sigma_min(self) -> float:
        return float(self.singular_values[-1])

    @property
    def sigma_max(self) -> float:
        return float(self.singular_values[0])


def canonicalize(vertex: int, matrix: np.ndarray) -> PepsTensor:
    """Polar-decompose a vertex map and package it for simulation.

    Raises :class:`InjectivityError` when the map is not injective (rank
    deficient), since the whole construction relies on left-invertibility.
    """
    m = linalg.as_matrix(matrix, f"tensor at vertex {vertex}")
    isometry, psd = linalg.polar_decompose(m)
    sing = linalg.svd(m).sigma
    return PepsTensor(
        vertex=vertex,
        matrix=m,
        isometry=isometry,
        positive_factor=psd,
        singular_values=sing,
    )


def check_tensors(g: InteractionGraph, tensors: list[PepsTensor]) -> None:
    """Validate that ``tensors[v]`` matches vertex ``v``'s dimensions."""
    if len(tensors) != g.num_vertices:
        raise InvalidInputError(
            f"need {g.num_vertices} tensors, got {len(tensors)}"
        )
    for v, t in enumerate(tensors):
        if t.vertex != v:
            raise InvalidInputError(f"tensor at position {v} is labeled {t.vertex}")
        expected = (g.physical_dims[v], g.register_dim(v))
        if t.matrix.shape != expected:
            raise InvalidInputError(
                f"tensor at vertex {v} has shape {t.matrix.shape}, expected {expected}"
            )


def apply_on_register(
    op: np.ndarray, v: int, state: np.ndarray, register_dims: tuple[int, ...]
) -> tuple[np.ndarray, tuple[int, ...]]:
    """Apply a (possibly rectangular) operator to one vertex register.

    Returns the new state vector and the updated register dimensions.
    """
    dims = list(register_dims)
    tensor = state.reshape(dims)
    tensor = np.tensordot(op, tensor, axes=([1], [v]))
    tensor = np.moveaxis(tensor, 0, v)
    dims[v] = op.shape[0]
    return tensor.reshape(-1), tuple(dims)


def pair_state(g: InteractionGraph) -> np.ndarray:
    """Normalized product of maximally entangled pairs, one per edge.

    This is the unique zero-energy state of the initial Hamiltonian made of
    edge pair-terms.
    """
    check_dim(g.global_dim, "pair state")
    # global slot layout: per vertex, one axis per incident edge
    slot_of: dict[tuple[int, int], int] = {}
    slot = 0
    for v in range(g.num_vertices):
        for eid in g.incident_edges(v):
            slot_of[(v, eid)] = slot
            slot += 1
    operands: list = []
    for eid, (u, v) in enumerate(g.edges):
        d = g.bond_dims[eid]
        pair = np.eye(d, dtype=complex) / math.sqrt(d)
        operands.append(pair)
        operands.append([slot_of[(u, eid)], slot_of[(v, eid)]])
    out_axes = list(range(slot))
    state = np.einsum(*operands, out_axes).reshape(-1)
    return state


def contract_partial(
    g: InteractionGraph, tensors: list[PepsTensor], num_processed: int
) -> tuple[np.ndarray, float]:
    """Exact intermediate target state after ``num_processed`` vertices.

    Applies the positive factor of every processed vertex (a prefix of the
    total order) to the pair state. Returns the normalized state and the
    squared norm ``z`` of the unnormalized vector; ``z`` starts at 1 for the
    empty prefix.
    """
    if not 0 <= num_processed <= g.num_vertices:
        raise InvalidInputError(
            f"prefix length {num_processed} out of range 0..{g.num_vertices}"
        )
    check_tensors(g, tensors)
    state = pair_state(g)
    dims = g.register_dims
    for v in g.order[:num_processed]:
        state, dims = apply_on_register(tensors[v].positive_factor, v, state, dims)
    z = float(np.vdot(state, state).real)
    if z <= 0.0 or not math.isfinite(z):
        raise InjectivityError(
            f"partial contraction collapsed to zero norm at prefix {num_processed}"
        )
    return state / math.sqrt(z), z


def z_ratio_bound(
    g: InteractionGraph, tensors: list[PepsTensor], t: int, tol: float = 1e-10
) -> tuple[float, float]:
    """Ratio of consecutive squared norms and its proven lower bound.

    The ratio ``z_{t+1}/z_t`` can never drop below the squared smallest
    singular value of the map applied at step ``t+1``; a violation indicates
    an implementation bug and raises :class:`BoundViolationError`.
    """
    if not 0 <= t < g.num_vertices:
        raise InvalidInputError(f"step {t} out of range 0..{g.num_vertices - 1}")
    _, z_t = contract_partial(g, tensors, t)
    _, z_next = contract_partial(g, tensors, t + 1)
    ratio = z_next / z_t
    bound = tensors[g.order[t]].sigma_min ** 2
    if ratio < bound - tol:
        raise BoundViolationError(
            f"norm-ratio bound violated at step {t}: ratio={ratio:.12e} < "
            f"sigma_min^2={bound:.12e}"
        )
    return ratio, bound


def restore_gauge(
    g: InteractionGraph, tensors: list[PepsTensor], state: np.ndarray
) -> np.ndarray:
    """Map a fully processed canonical-gauge state to the physical spaces.

    Applies each stored polar isometry, turning the register of vertex ``v``
    into its physical space of dimension ``physical_dims[v]``. Isometries
    preserve the norm; any loss beyond tolerance means the state had weight
    outside a physical image.
    """
    check_tensors(g, tensors)
    full_dim = math.prod(g.physical_dims)
    check_dim(full_dim, "gauge-restored state")
    state = np.asarray(state, dtype=complex)
    if state.shape != (g.global_dim,):
        raise InvalidInputError(
            f"state has shape {state.shape}, expected ({g.global_dim},)"
        )
    dims = g.register_dims
    out = state
    for v in range(g.num_vertices):
        out, dims = apply_on_register(tensors[v].isometry, v, out, dims)
    norm = float(np.linalg.norm(out))
    if abs(norm - 1.0) > 1e-8:
        raise GaugeRestoreError(
            f"gauge restoration lost norm: |restored| = {norm:.12f}"
        )
    return out / norm


def peps_state(g: InteractionGraph, tensors: list[PepsTensor]) -> np.ndarray:
    """Directly contracted normalized state of the original vertex maps.

    Independent oracle for end-to-end checks: applies the raw input matrices
    (not their polar factors) to the pair state and normalizes.
    """
    check_tensors(g, tensors)
    full_dim = math.prod(g.physical_dims)
    check_dim(full_dim, "contracted state")
    state = pair_state(g)
    dims = g.register_dims
    for v in range(g.num_vertices):
        state, dims = apply_on_register(tensors[v].matrix, v, state, dims)
    norm = float(np.linalg.norm(state))
    if norm <= 0.0:
        raise InjectivityError("contraction of the input maps has zero norm")
    return state / norm
