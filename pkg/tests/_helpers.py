"""Shared construction helpers for the test suite."""

from __future__ import annotations

import numpy as np

from peps_forge.harness import (
    GraphSpec,
    InstanceConfig,
    TensorSpec,
    build_instance,
)

CHAIN2 = GraphSpec(topology="chain", length=2)
CHAIN3 = GraphSpec(topology="chain", length=3)
CHAIN4 = GraphSpec(topology="chain", length=4)
RING4 = GraphSpec(topology="ring", length=4)


def random_config(
    graph: GraphSpec,
    kappa_max: float,
    tensor_seed: int,
    bond_dim: int = 2,
    physical_dims: tuple[int, ...] | None = None,
    order: tuple[int, ...] | None = None,
    eps: float = 0.1,
    seed: int = 7,
) -> InstanceConfig:
    return InstanceConfig(
        graph=graph,
        bond_dim=bond_dim,
        tensors=TensorSpec(
            source="random",
            kappa_max=kappa_max,
            physical_dims=physical_dims,
            seed=tensor_seed,
        ),
        seed=seed,
        order=order,
        eps=eps,
    )


def random_instance(graph: GraphSpec, kappa_max: float, tensor_seed: int, **kw):
    return build_instance(random_config(graph, kappa_max, tensor_seed, **kw))


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (z + z.conj().T) / 2


def random_complex(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(random_complex(n, n, rng))
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * phases.conj()
