"""Term construction, step assembly bookkeeping, spectral analysis."""

from __future__ import annotations

import math

import numpy as np
import pytest

from _helpers import CHAIN2, CHAIN3, RING4, random_instance
from peps_forge import linalg, network
from peps_forge.errors import (
    DegenerateGroundSpaceError,
    InvalidInputError,
    NumericalFailureError,
)
from peps_forge.hamiltonian import (
    LocalHamiltonian,
    LocalTerm,
    advance_step,
    assemble_step,
    edge_term,
    edge_term_on_registers,
    ground_analysis,
    parent_term,
    penalty_term,
    terms_to_json,
)
from peps_forge.network import InteractionGraph, canonicalize


class TestEdgeTerm:
    def test_bond_two_spectrum(self):
        h = edge_term(2)
        eigs = np.linalg.eigvalsh(h)
        assert np.allclose(eigs, [0.0, 1.0, 1.0, 1.0], atol=1e-12)

    def test_annihilates_pair(self):
        h = edge_term(2)
        omega = np.zeros(4)
        omega[[0, 3]] = 1.0 / math.sqrt(2)
        assert np.linalg.norm(h @ omega) <= 1e-12

    def test_bond_three_rank(self):
        h = edge_term(3)
        eigs = np.linalg.eigvalsh(h)
        assert int(np.sum(eigs > 0.5)) == 8

    def test_projector(self):
        h = edge_term(3)
        assert np.abs(h @ h - h).max() <= 1e-12

    def test_rejects_bond_one(self):
        with pytest.raises(InvalidInputError):
            edge_term(1)


class TestPenaltyTerm:
    def test_identity_projector_gives_zero(self):
        term = penalty_term(0, np.eye(4), 1.0)
        assert np.abs(term.matrix).max() == 0.0
        assert term.kind == "penalty"
        assert term.support == (0,)

    def test_rank_one_penalty(self):
        term = penalty_term(1, np.diag([1.0, 0.0]), 1.0)
        assert np.abs(term.matrix - np.diag([0.0, 1.0])).max() <= 1e-12

    def test_weighted_spectrum(self):
        p_phy = np.zeros((4, 4))
        p_phy[0, 0] = 1.0
        term = penalty_term(2, p_phy, 5.0)
        eigs = np.linalg.eigvalsh(term.matrix)
        assert np.allclose(eigs, [0.0, 5.0, 5.0, 5.0], atol=1e-12)

    def test_rejects_nonpositive_weight(self):
        with pytest.raises(InvalidInputError):
            penalty_term(0, np.eye(2), 0.0)


class TestParentTerm:
    def test_identity_maps_reduce_to_edge_term(self):
        graph, tensors = random_instance(RING4, 3.0, 11)
        for eid in range(len(graph.edges)):
            built = parent_term(graph, tensors, eid, frozenset())
            direct = edge_term_on_registers(graph, eid)
            assert built.kind == "edge_pair"
            assert built.support == direct.support
            assert np.abs(built.matrix - direct.matrix).max() <= 1e-12

    def test_kind_labels(self):
        graph, tensors = random_instance(CHAIN2, 2.0, 3)
        assert parent_term(graph, tensors, 0, frozenset()).kind == "edge_pair"
        assert parent_term(graph, tensors, 0, frozenset({0})).kind == "boundary"
        assert parent_term(graph, tensors, 0, frozenset({0, 1})).kind == "parent"

    @pytest.mark.parametrize("seed", range(4))
    def test_annihilates_contracted_state(self, seed):
        graph, tensors = random_instance(CHAIN2, 4.0, 30 + seed)
        term = parent_term(graph, tensors, 0, frozenset({0, 1}))
        state, _ = network.contract_partial(graph, tensors, 2)
        assert np.linalg.norm(term.matrix @ state) <= 1e-10

    def test_projector_and_complement_rank(self):
        graph, tensors = random_instance(RING4, 3.0, 12)
        term = parent_term(graph, tensors, 0, frozenset({0, 1}))
        m = term.matrix
        assert np.abs(m @ m - m).max() <= 1e-9
        eigs = np.linalg.eigvalsh(m)
        r_u = graph.register_dim(0)
        r_v = graph.register_dim(1)
        expected_rank = r_u * r_v - (r_u * r_v) // 4
        assert int(np.sum(eigs > 0.5)) == expected_rank

    def test_annihilates_every_later_prefix(self):
        graph, tensors = random_instance(CHAIN3, 3.0, 13)
        # edge (0,1) fully processed after two steps of the natural order
        term = parent_term(graph, tensors, 0, frozenset({0, 1}))
        embedded = linalg.embed_term(term.matrix, term.support, graph.register_dims)
        for prefix in (2, 3):
            state, _ = network.contract_partial(graph, tensors, prefix)
            assert np.linalg.norm(embedded @ state) <= 1e-10

    def test_boundary_term_annihilates_prefix(self):
        graph, tensors = random_instance(CHAIN3, 3.0, 14)
        term = parent_term(graph, tensors, 0, frozenset({0}))
        embedded = linalg.embed_term(term.matrix, term.support, graph.register_dims)
        state, _ = network.contract_partial(graph, tensors, 1)
        assert np.linalg.norm(embedded @ state) <= 1e-10

    def test_ill_conditioned_image_rejected(self):
        # a spectator factor scaled by 1e-7 gives a Gram condition ~1e14
        g = InteractionGraph.build(3, [(0, 1), (1, 2)])
        from peps_forge.errors import ConditioningError

        tensors = [
            canonicalize(0, np.eye(2)),
            canonicalize(1, np.diag([1.0, 1e-7, 1.0, 1e-7])),
            canonicalize(2, np.eye(2)),
        ]
        with pytest.raises(ConditioningError):
            parent_term(g, tensors, 0, frozenset({0, 1}))


def _kinds(h: LocalHamiltonian) -> list[str]:
    return [t.kind for t in h.terms]


class TestAssembleStep:
    def test_step_zero_is_edge_terms_only(self):
        graph, tensors = random_instance(RING4, 2.0, 40)
        h0 = assemble_step(graph, tensors, 0)
        assert len(h0.terms) == len(graph.edges)
        assert set(_kinds(h0)) == {"edge_pair"}

    def test_final_step_with_identity_tensors_keeps_kernel(self):
        g = InteractionGraph.build(3, [(0, 1), (1, 2)])
        tensors = [canonicalize(v, np.eye(g.register_dim(v))) for v in range(3)]
        h0 = assemble_step(g, tensors, 0)
        h_final = assemble_step(g, tensors, 3)
        p0 = h0.kernel_basis()
        p3 = h_final.kernel_basis()
        assert p0.shape == p3.shape
        overlap = np.abs(p0.conj().T @ p3)
        assert overlap.max() >= 1.0 - 1e-10

    def test_first_step_replaces_only_touching_terms(self):
        graph, tensors = random_instance(CHAIN3, 3.0, 41)
        h0 = assemble_step(graph, tensors, 0)
        h1 = assemble_step(graph, tensors, 1)
        # vertex 0 processed: edge (0,1) becomes a boundary term,
        # edge (1,2) keeps its pair term, one penalty appears on vertex 0
        by_support_0 = {t.support: t for t in h0.terms}
        by_support_1 = {t.support: t for t in h1.terms if t.kind != "penalty"}
        assert by_support_1[(0, 1)].kind == "boundary"
        assert by_support_1[(1, 2)].kind == "edge_pair"
        assert np.abs(
            by_support_1[(1, 2)].matrix - by_support_0[(1, 2)].matrix
        ).max() == 0.0
        penalties = [t for t in h1.terms if t.kind == "penalty"]
        assert [t.support for t in penalties] == [(0,)]

    def test_term_counts_grow_with_step(self):
        graph, tensors = random_instance(RING4, 2.0, 42)
        for t in range(5):
            h = assemble_step(graph, tensors, t)
            assert len(h.terms) == len(graph.edges) + t
            assert h.step == t

    @pytest.mark.parametrize("spec,kappa,seed", [(CHAIN3, 3.0, 43), (RING4, 2.0, 44)])
    def test_incremental_matches_scratch(self, spec, kappa, seed):
        graph, tensors = random_instance(spec, kappa, seed)
        current = assemble_step(graph, tensors, 0)
        for t in range(1, graph.num_vertices + 1):
            current = advance_step(graph, tensors, current)
            scratch = assemble_step(graph, tensors, t)
            assert [t_.support for t_ in current.terms] == [
                t_.support for t_ in scratch.terms
            ]
            assert _kinds(current) == _kinds(scratch)
            for a, b in zip(current.terms, scratch.terms):
                assert np.abs(a.matrix - b.matrix).max() <= 1e-12

    def test_custom_order_bookkeeping(self):
        graph, tensors = random_instance(CHAIN3, 2.0, 45, order=(2, 0, 1))
        h1 = assemble_step(graph, tensors, 1)
        non_penalty = {t.support: t.kind for t in h1.terms if t.kind != "penalty"}
        assert non_penalty[(1, 2)] == "boundary"
        assert non_penalty[(0, 1)] == "edge_pair"

    def test_all_terms_psd_projector_like(self, fixture_zoo):
        for name, (_, _, graph, tensors) in fixture_zoo.items():
            for t in range(graph.num_vertices + 1):
                h = assemble_step(graph, tensors, t)
                for term in h.terms:
                    m = term.matrix
                    assert np.abs(m - m.conj().T).max() <= 1e-10
                    eigs = np.linalg.eigvalsh(m)
                    assert eigs.min() >= -1e-9
                    if term.kind != "penalty":
                        # projector spectrum: eigenvalues in {0, 1}
                        assert np.all(
                            (np.abs(eigs) < 1e-9) | (np.abs(eigs - 1.0) < 1e-9)
                        )


class TestGroundAnalysis:
    def test_single_edge_initial_spectrum(self):
        g = InteractionGraph.build(2, [(0, 1)])
        tensors = [canonicalize(v, np.eye(2)) for v in range(2)]
        ga = ground_analysis(assemble_step(g, tensors, 0))
        assert abs(ga.lambda0) <= 1e-9
        assert ga.gap == pytest.approx(1.0, abs=1e-10)
        assert ga.ground_degeneracy == 1

    def test_disconnected_edges_gap_one(self):
        g = InteractionGraph.build(4, [(0, 1), (2, 3)])
        tensors = [canonicalize(v, np.eye(2)) for v in range(4)]
        ga = ground_analysis(assemble_step(g, tensors, 0))
        assert ga.gap == pytest.approx(1.0, abs=1e-10)
        assert ga.ground_degeneracy == 1

    @pytest.mark.parametrize("seed", range(3))
    def test_ground_state_matches_oracle(self, seed):
        graph, tensors = random_instance(CHAIN3, 4.0, 50 + seed)
        for t in range(graph.num_vertices + 1):
            ga = ground_analysis(assemble_step(graph, tensors, t))
            target, _ = network.contract_partial(graph, tensors, t)
            assert abs(np.vdot(ga.ground_state, target)) ** 2 >= 1.0 - 1e-9
            assert ga.gap > 0

    def test_degenerate_kernel_rejected(self):
        g = InteractionGraph.build(2, [(0, 1)])
        term = LocalTerm(
            support=(0, 1), matrix=np.diag([0.0, 0.0, 1.0, 1.0]), kind="parent"
        )
        h = LocalHamiltonian(graph=g, step=1, terms=[term])
        with pytest.raises(DegenerateGroundSpaceError):
            ground_analysis(h)

    def test_missing_zero_energy_rejected(self):
        g = InteractionGraph.build(2, [(0, 1)])
        term = LocalTerm(support=(0, 1), matrix=np.eye(4), kind="parent")
        h = LocalHamiltonian(graph=g, step=0, terms=[term])
        with pytest.raises(NumericalFailureError):
            ground_analysis(h)


class TestHamiltonianExport:
    def test_terms_to_json_shape(self):
        graph, tensors = random_instance(CHAIN2, 2.0, 60)
        h = assemble_step(graph, tensors, 1)
        doc = terms_to_json(h)
        assert len(doc) == len(h.terms)
        first = doc[0]
        assert set(first) == {"support", "kind", "matrix"}
        dim = len(first["matrix"])
        assert len(first["matrix"][0]) == dim
        assert len(first["matrix"][0][0]) == 2
        rebuilt = np.array(
            [[complex(re, im) for re, im in row] for row in first["matrix"]]
        )
        assert np.abs(rebuilt - h.terms[0].matrix).max() == 0.0

    def test_pair_state_is_initial_ground_state(self, fixture_zoo):
        _, _, graph, tensors = fixture_zoo["grid2x2"]
        h0 = assemble_step(graph, tensors, 0)
        state = network.pair_state(graph)
        assert abs(h0.expectation(state)) <= 1e-12
        ga = ground_analysis(h0)
        assert abs(np.vdot(ga.ground_state, state)) ** 2 >= 1.0 - 1e-10
