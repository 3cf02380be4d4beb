import pytest

from equilat.bases import graver_basis
from equilat.chains import stabilization_scan, truncation
from equilat.errors import NotIndependentError
from equilat.intlinalg import mat_vec, rank
from equilat.models import (
    HierModel,
    IndependentSetScenario,
    SimplicialComplex,
    VaryingLevels,
    independence_complex,
    independence_scenario,
    kernel_lattice,
    marginal_matrix,
    marginal_rank,
    no3way_complex,
    no3way_levels,
    no3way_witness,
    scenario_chain,
    scenario_shape,
)
from equilat.symmetry import PermutationWord, act


def test_complex_validation():
    with pytest.raises(ValueError):
        SimplicialComplex(2, ((1,), (1, 2)))
    with pytest.raises(ValueError):
        SimplicialComplex(2, ((3,),))
    with pytest.raises(ValueError):
        SimplicialComplex(2, ())
    with pytest.raises(ValueError):
        HierModel(independence_complex(), (2,))


def test_marginal_matrix_examples():
    M = marginal_matrix(HierModel(independence_complex(), (2, 2)))
    assert M == [[1, 1, 0, 0], [0, 0, 1, 1], [1, 0, 1, 0], [0, 1, 0, 1]]
    assert marginal_matrix(HierModel(SimplicialComplex(1, ((1,),)), (3,))) == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    M = marginal_matrix(HierModel(no3way_complex(), (2, 2, 2)))
    assert len(M) == 12 and len(M[0]) == 8 and rank(M) == 7


def test_marginals_preserve_the_total(rng):
    for model in [HierModel(no3way_complex(), (2, 3, 2)), HierModel(independence_complex(), (3, 2))]:
        M = marginal_matrix(model)
        for _ in range(20):
            u = [rng.randint(0, 5) for _ in range(model.num_cells)]
            out = mat_vec(M, u)
            pos = 0
            for f in model.complex.facets:
                k = len(model.marginal_cells(f))
                assert sum(out[pos : pos + k]) == sum(u)
                pos += k


def test_kernel_lattice_examples():
    L = kernel_lattice(HierModel(independence_complex(), (2, 2)))
    assert L.rank == 1 and L.hnf_basis[0] in ((1, -1, -1, 1), (-1, 1, 1, -1))
    assert kernel_lattice(HierModel(SimplicialComplex(2, ((1, 2),)), (2, 3))).rank == 0
    L = kernel_lattice(HierModel(no3way_complex(), (2, 2, 2)))
    assert L.rank == 1
    assert L.hnf_basis[0] in ((1, -1, -1, 1, -1, 1, 1, -1), (-1, 1, 1, -1, 1, -1, -1, 1))


def test_kernel_and_graver_have_zero_marginals():
    for s, n in [(independence_scenario(), 3), (no3way_levels(2), 2)]:
        M = s.marginal_matrix(n)
        L = s.kernel_lattice(n)
        for v in list(L.basis_vectors()) + graver_basis(L).elements:
            assert not any(mat_vec(M, v.dense()))


def test_scenario_identification():
    s = VaryingLevels(SimplicialComplex(3, ((1,), (2,), (3,))), (2,), {1: 3, 3: 2})
    assert (s.d, s.c) == (1, 6)
    for n in (2, 3):
        for cell in s.model(n).cells():
            assert s.to_cell(s.to_index(cell)) == cell
    # Most significant digit belongs to the smallest fixed coordinate.
    assert s.to_index((2, 1, 1)) == (1, 3)
    assert s.to_index((1, 1, 2)) == (1, 2)
    assert VaryingLevels.from_json(s.to_json()) == s


def test_scenario_shape_examples():
    shape, cells = scenario_shape(independence_scenario(), 2)
    assert (shape.d, shape.c) == (2, 1)
    assert cells[(1, 2)] == (1, 2, 1)
    shape, _ = scenario_shape(VaryingLevels(no3way_complex(), (3,), {1: 2, 2: 2}), 2)
    assert (shape.d, shape.c) == (1, 4)
    with pytest.raises(ValueError):
        VaryingLevels(independence_complex(), (), {1: 2, 2: 2})


def test_non_independent_set_is_refused():
    with pytest.raises(NotIndependentError) as exc:
        IndependentSetScenario(no3way_complex(), (1, 2), {3: 2})
    assert exc.value.reason == "not-independent"
    with pytest.raises(NotIndependentError):
        scenario_chain(no3way_levels(2))
    with pytest.raises(NotIndependentError):
        scenario_shape(no3way_levels(2), 2)


def test_scenario_chain_examples():
    chain = scenario_chain(independence_scenario())
    L2 = truncation(chain, 2)
    assert L2.rank == 1 and L2.hnf_basis[0] in ((1, -1, -1, 1), (-1, 1, 1, -1))
    single = IndependentSetScenario(SimplicialComplex(2, ((1, 2),)), (1,), {2: 2})
    assert truncation(scenario_chain(single), 3).rank == 0


def test_scenario_kernels_are_equivariant(rng):
    for s, n in [(independence_scenario(), 3), (no3way_levels(2), 3)]:
        L = s.kernel_lattice(n)
        for _ in range(10):
            sigma = PermutationWord(tuple(rng.sample(range(1, n + 1), n)))
            for v in L.basis_vectors():
                assert L.member(act(sigma, v, L.shape))


@pytest.mark.parametrize("n", [2, 3])
def test_no3way_witness_examples(n):
    u = no3way_witness(n)
    L = no3way_levels(2).kernel_lattice(n)
    assert L.member(u)
    assert u.norm() == 4 * n and u.support_size() == 4 * n
    assert set(x for _, x in u.items()) == {1, -1}
    with pytest.raises(ValueError):
        no3way_witness(1)


def test_independence_graver_elements_are_cycles():
    s = independence_scenario()
    for n in (2, 3, 4):
        for g in graver_basis(s.kernel_lattice(n)).elements:
            vals = [x for _, x in g.items()]
            assert set(vals) <= {1, -1} and vals.count(1) == vals.count(-1)
            for k in range(1, n + 1):
                assert sum(x for idx, x in g.items() if idx[0] == k) == 0
                assert sum(x for idx, x in g.items() if idx[1] == k) == 0


def test_independence_graver_orbits_grow():
    res = stabilization_scan(scenario_chain(independence_scenario()), "graver", 4)
    counts = [len(res.reps[n]) for n in (2, 3, 4)]
    assert counts[0] < counts[1] < counts[2]
    assert res.witness is None


def test_independence_markov_moves_keep_support_four():
    res = stabilization_scan(scenario_chain(independence_scenario()), "markov", 4, n_min=2)
    assert [lv["support_bound"] for lv in res.levels] == [4, 4, 4]
    # The diagonal action separates 2x2 moves by how many values they use.
    assert [len(res.reps[n]) for n in (2, 3, 4)] == [1, 3, 4]


def test_marginal_rank_helper():
    assert marginal_rank(HierModel(independence_complex(), (3, 3))) == 5
