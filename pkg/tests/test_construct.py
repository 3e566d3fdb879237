import numpy as np
import pytest

from src.greenseq.classify import AffineA, classify, min_length
from src.greenseq.construct import (
    DirectSumSpec,
    _r_final,
    _r_initial,
    _s_final,
    _s_initial,
    affine_components,
    affine_mgs,
    attach_branch_mgs,
    concat_mgs,
    core_mgs_type_II,
    core_mgs_type_III,
    direct_sum,
    direct_sum_min_length,
    min_mgs,
    split_affine_direct_sum,
    topological_mgs,
)
from src.greenseq.exceptions import BadIndex, HypothesisViolated, NotABranchQuiver, PreconditionViolated, UnsupportedClass
from src.greenseq.green_seq import GreenSequence, is_maximal_green, shortest_mgs
from src.greenseq.mutation_class import mutation_class, random_mutation
from src.greenseq.quiver_core import Quiver
from tests.quivers import (
    branched_affine,
    cycle_q,
    eleven_vertex_sum,
    kronecker,
    kronecker_triangle,
    large_affine,
    linear,
    oriented_cycle,
    q,
    star_d4,
    type_iv_quiver,
)


def first_summand():
    return q(4, (2, 1), (1, 3), (4, 2), (3, 4))


def second_summand():
    # vertices 5..11 of the combined quiver, shifted down by four
    return q(7, (2, 1), (3, 2), (2, 4), (4, 3), (4, 5), (5, 6), (7, 5), (6, 7))


def eleven_vertex_spec():
    return DirectSumSpec(first_summand(), second_summand(), (1, 1, 1, 3, 4, 4), (5, 8, 11, 8, 9, 11))


def test_direct_sum_rebuilds_combined_quiver():
    assert direct_sum(eleven_vertex_spec()) == eleven_vertex_sum()
    assert eleven_vertex_spec().labels == tuple(range(1, 12))


def test_direct_sum_is_not_associative():
    # with the single vertex 5 left out, arrows into it have no head in the second summand
    rest, _ = eleven_vertex_sum().full_subquiver(range(6, 12))
    try:
        DirectSumSpec(first_summand(), rest, (1, 1, 1, 3, 4, 4), (5, 8, 11, 8, 9, 11), None, tuple(range(6, 12)))
    except BadIndex as exc:
        assert exc.context["vertex"] == 5
    else:
        assert False, "Expected BadIndex"


def test_direct_sum_spec_validation():
    for kwargs in (
        {"tails": (2,), "heads": (1,)},
        {"tails": (1,), "heads": ()},
        {"tails": (), "heads": (), "second_labels": (1,)},
    ):
        try:
            DirectSumSpec(Quiver(1), Quiver(1), **kwargs)
        except BadIndex:
            pass
        else:
            assert False, f"Expected BadIndex for {kwargs}"


def test_concat_on_two_vertices():
    spec = DirectSumSpec(Quiver(1), Quiver(1), (1,), (2,))
    steps = concat_mgs(spec, GreenSequence((1,)), GreenSequence((1,)))
    assert steps.steps == (1, 2)
    assert is_maximal_green(direct_sum(spec), steps)
    assert direct_sum_min_length(spec) == 2


def test_concat_eleven_vertex_sum():
    spec = eleven_vertex_spec()
    first = shortest_mgs(first_summand(), 8).witness
    second, _ = min_mgs(second_summand())
    assert len(first) == 6 and len(second) == 9
    steps = concat_mgs(spec, first, second)
    assert len(steps) == direct_sum_min_length(spec) == 15
    assert is_maximal_green(eleven_vertex_sum(), steps)


def test_concat_with_relabelled_summands():
    spec = DirectSumSpec(Quiver(1), linear(2), (3,), (1,), first_labels=(3,), second_labels=(1, 2))
    assert direct_sum(spec) == q(3, (3, 1), (1, 2))
    steps = concat_mgs(spec, GreenSequence((1,)), GreenSequence((1, 2)))
    assert steps.steps == (3, 1, 2)


def test_concat_rejects_parallel_connecting_arrows():
    spec = DirectSumSpec(Quiver(1), Quiver(1), (1, 1), (2, 2))
    try:
        concat_mgs(spec, GreenSequence((1,)), GreenSequence((1,)))
    except HypothesisViolated as exc:
        assert exc.context["pairs"] == [[1, 2]]
    else:
        assert False, "Expected HypothesisViolated"


def test_topological_mgs():
    assert topological_mgs(q(3, (3, 1), (2, 1), (3, 2))).steps == (3, 2, 1)
    assert topological_mgs(star_d4()).steps == (1, 2, 3, 4)
    assert is_maximal_green(cycle_q(3, 2), topological_mgs(cycle_q(3, 2)))


def test_core_sequences():
    assert core_mgs_type_II(classify(q(4, (3, 4), (4, 1), (4, 2), (1, 3), (2, 3)))).steps == (4, 1, 2, 3, 4)
    assert core_mgs_type_III(classify(oriented_cycle(4))).steps == (1, 2, 3, 4, 2, 1)


def test_attach_pendant_vertices():
    assert attach_branch_mgs(linear(3), [1], GreenSequence((1,))).steps == (1, 2, 3)
    assert attach_branch_mgs(q(3, (2, 1), (2, 3)), [1], GreenSequence((1,))).steps == (2, 1, 3)


def test_attach_pendant_three_cycle():
    steps = attach_branch_mgs(oriented_cycle(3), [1], GreenSequence((1,)))
    assert steps.steps == (3, 1, 2, 3)
    assert is_maximal_green(oriented_cycle(3), steps)


def test_attach_rejects_non_branch():
    try:
        attach_branch_mgs(oriented_cycle(4), [1], GreenSequence((1,)))
    except NotABranchQuiver as exc:
        assert exc.context["missing"] == [3]
    else:
        assert False, "Expected NotABranchQuiver"


def test_affine_components_of_large_core():
    found = classify(large_affine())
    assert isinstance(found, AffineA)
    assert split_affine_direct_sum(found) is None
    parts = affine_components(found)
    assert [r.source for r in parts.clockwise] == [10, 17, 19]
    assert [s.source for s in parts.counterclockwise] == [10, 17, 19]
    assert [_r_initial(r) for r in parts.clockwise] == [[1, 2, 3], [4], [5, 6, 7, 8, 9]]
    assert [_s_initial(s) for s in parts.counterclockwise] == [
        [10, 11, 12, 13, 14, 15, 16],
        [17, 18],
        [19, 20, 21, 22],
    ]
    assert [_s_final(s) for s in parts.counterclockwise] == [[23, 24, 25, 12, 13], [26], [27, 20]]
    assert [_r_final(r, parts.counterclockwise) for r in parts.clockwise] == [[1, 2, 17], [4], [5, 6, 8, 15]]


def test_affine_mgs_large_core():
    found = classify(large_affine())
    steps = affine_mgs(found)
    assert len(steps) == 38
    assert is_maximal_green(large_affine(), steps)


def test_affine_components_preconditions():
    for quiver, clause in (
        (kronecker_triangle(), "kronecker"),
        (kronecker(), "class"),
        (branched_affine(), "branches"),
        (q(5, (1, 2), (2, 3), (4, 3), (1, 4), (5, 1), (2, 5)), "direct-sum"),
    ):
        try:
            affine_components(classify(quiver))
        except PreconditionViolated as exc:
            assert exc.context["clause"] == clause
        else:
            assert False, f"Expected PreconditionViolated ({clause})"


def test_split_affine_direct_sum():
    spec = split_affine_direct_sum(classify(branched_affine()))
    assert spec.first_labels == (1, 2, 3, 7, 8)
    assert spec.second_labels == (4, 5, 6, 9, 10, 11, 12, 13, 14, 15, 16)
    assert set(zip(spec.tails, spec.heads)) == {(3, 4), (8, 9)}
    assert direct_sum(spec) == branched_affine()

    try:
        split_affine_direct_sum(classify(linear(3)))
    except PreconditionViolated as exc:
        assert exc.context["clause"] == "class"
    else:
        assert False, "Expected PreconditionViolated"


def test_min_mgs_values():
    cases = (
        (linear(4), 4),
        (oriented_cycle(3), 4),
        (q(5, (1, 3), (2, 3), (3, 4), (4, 5), (5, 3)), 6),
        (q(4, (3, 4), (4, 1), (4, 2), (1, 3), (2, 3)), 5),
        (oriented_cycle(4), 6),
        (kronecker(), 2),
        (cycle_q(2, 1), 3),
        (type_iv_quiver(), 18),
        (branched_affine(), 21),
        (large_affine(), 38),
    )
    for quiver, expected in cases:
        steps, length = min_mgs(quiver)
        assert length == expected, quiver
        assert len(steps) == expected
        assert is_maximal_green(quiver, steps)


def test_min_mgs_type_IV_with_branch():
    quiver = Quiver(12, type_iv_quiver().arrows + ((11, 12, 1),))
    found = classify(quiver)
    assert found.tag == "D_IV"
    assert found.parts[6] == (11, 12)
    steps, length = min_mgs(quiver, found)
    assert length == min_length(quiver) == 19
    assert steps.steps[-1] == 12


def test_min_mgs_unsupported():
    try:
        min_mgs(Quiver(3, ((1, 2, 2), (2, 3, 2), (3, 1, 2))))
    except UnsupportedClass:
        pass
    else:
        assert False, "Expected UnsupportedClass"


@pytest.mark.slow
def test_min_mgs_matches_search_on_finite_classes():
    for start in (linear(6), q(5, (1, 3), (2, 3), (3, 4), (4, 5)), q(6, (1, 3), (2, 3), (3, 4), (4, 5), (5, 6))):
        for quiver in mutation_class(start):
            steps, length = min_mgs(quiver)
            assert length == len(steps)
            if quiver.n <= 5:
                assert shortest_mgs(quiver, depth_bound=length).minimal_length == length


@pytest.mark.slow
def test_min_mgs_on_affine_classes():
    for along, against in ((2, 1), (2, 2), (3, 1), (3, 2), (4, 1)):
        checked = 0
        for quiver in mutation_class(cycle_q(along, against)):
            found = classify(quiver)
            if not isinstance(found, AffineA):
                continue
            steps, length = min_mgs(quiver, found)
            certificate = shortest_mgs(quiver, depth_bound=length)
            assert certificate.minimal_length == length, quiver
            checked += 1
        assert checked >= 1


def six_vertex_members(family):
    if family == "A6":
        return mutation_class(linear(6))
    rng = np.random.default_rng(2024)
    d6 = q(6, (1, 3), (2, 3), (3, 4), (4, 5), (5, 6))
    return [random_mutation(d6, 8, rng) for _ in range(40)]


@pytest.mark.slow
@pytest.mark.parametrize("family", ["A6", "D6"])
def test_search_formula_and_construction_agree_on_six_vertices(family):
    reverse = {1: 6, 2: 5, 3: 4, 4: 3, 5: 2, 6: 1}
    for quiver in six_vertex_members(family):
        found = classify(quiver)
        steps, length = min_mgs(quiver, found)
        assert length == min_length(quiver, found)
        assert is_maximal_green(quiver, steps)
        assert shortest_mgs(quiver, depth_bound=length).minimal_length == length, quiver
        assert min_length(quiver.relabel(reverse)) == length
