import numpy as np
import pytest

from src.greenseq.classify import (
    AffineA,
    TypeD_I,
    TypeD_II,
    TypeD_III,
    TypeD_IV,
    affine_parameters,
    branch_decomposition,
    classify,
    formula_breakdown,
    is_connecting,
    is_type_A,
    min_length,
    three_cycles,
)
from src.greenseq.constants import TAG_A, TAG_ACYCLIC, TAG_AFFINE, TAG_UNKNOWN
from src.greenseq.exceptions import UnsupportedClass
from src.greenseq.green_seq import shortest_mgs
from src.greenseq.mutation_class import mutation_class, random_mutation
from src.greenseq.quiver_core import Quiver
from tests.quivers import (
    branched_affine,
    cycle_q,
    kronecker,
    kronecker_triangle,
    large_affine,
    linear,
    oriented_cycle,
    q,
    star_d4,
    type_iv_quiver,
)


def bowtie():
    return q(5, (1, 2), (2, 3), (3, 1), (3, 4), (4, 5), (5, 3))


def type_I_with_cycle():
    return q(5, (1, 3), (2, 3), (3, 4), (4, 5), (5, 3))


def type_II_core():
    return q(4, (3, 4), (4, 1), (4, 2), (1, 3), (2, 3))


def markov():
    return Quiver(3, ((1, 2, 2), (2, 3, 2), (3, 1, 2)))


def test_three_cycles_rotated_to_minimum():
    census = three_cycles(q(3, (2, 3), (3, 1), (1, 2)))
    assert census.triples == ((1, 2, 3),)
    assert census.count == 1
    assert three_cycles(type_iv_quiver()).count == 4
    assert three_cycles(large_affine()).count == 11
    assert three_cycles(markov()).count == 0


def test_is_type_A():
    assert is_type_A(linear(5))
    assert is_type_A(oriented_cycle(3))
    assert is_type_A(bowtie())
    assert not is_type_A(oriented_cycle(4))
    assert not is_type_A(kronecker())
    assert not is_type_A(type_I_with_cycle())
    # two 3-cycles sharing an arrow
    assert not is_type_A(q(4, (1, 2), (2, 3), (3, 1), (2, 4), (4, 3)))


def test_is_connecting():
    assert is_connecting(linear(3), 1)
    assert not is_connecting(linear(3), 2)
    assert is_connecting(oriented_cycle(3), 2)
    assert not is_connecting(bowtie(), 3)


def test_classify_simple_families():
    assert classify(linear(4)).tag == TAG_ACYCLIC
    assert classify(star_d4()).tag == TAG_ACYCLIC
    assert classify(oriented_cycle(3)).tag == TAG_A
    assert classify(markov()).tag == TAG_UNKNOWN
    assert classify(Quiver(4, ((1, 2, 1), (2, 3, 1), (3, 1, 1)))).tag == TAG_UNKNOWN


def test_classify_type_I():
    found = classify(type_I_with_cycle())
    assert isinstance(found, TypeD_I)
    assert {found.a, found.b} == {1, 2}
    assert found.c == 3
    assert found.rest == (3, 4, 5)


def test_classify_type_II_and_III():
    found = classify(type_II_core())
    assert isinstance(found, TypeD_II) and not isinstance(found, TypeD_III)
    assert (found.a, found.b, found.c, found.d) == (1, 2, 3, 4)

    found = classify(oriented_cycle(4))
    assert isinstance(found, TypeD_III)
    assert (found.a, found.c, found.b, found.d) == (1, 2, 3, 4)
    assert found.part1 == (2,) and found.part2 == (4,)


def test_classify_type_IV():
    found = classify(type_iv_quiver())
    assert isinstance(found, TypeD_IV)
    assert found.cycle == (1, 2, 3, 4, 5, 6, 7)
    assert found.b == {1: 8, 2: 9, 3: 10, 6: 11}
    assert found.parts == {1: (8,), 2: (9,), 3: (10,), 6: (11,)}
    assert found.degree_four() == [2, 3]


def test_classify_affine():
    found = classify(branched_affine())
    assert isinstance(found, AffineA)
    assert found.cycle == (2, 3, 4, 5, 6, 9, 8, 7)
    assert sum(found.clockwise) == 3
    assert sorted(v for v in found.z if v is not None) == [1, 10, 14]
    assert found.parts == {1: (1,), 10: (10, 11, 12, 13), 14: (14, 15, 16)}
    assert found.three_cycle_count == 5

    kron = classify(kronecker_triangle())
    assert kron.tag == TAG_AFFINE and kron.kronecker
    assert kron.z == (3, None)
    assert classify(kronecker()).tag == TAG_ACYCLIC


def test_to_dict():
    report = classify(type_II_core()).to_dict()
    assert report["class"] == "D_II"
    assert report["n"] == 4
    assert report["three_cycles"] == [[1, 3, 4], [2, 3, 4]]
    assert report["decomposition"]["Q1"] == [3]


def test_affine_parameters():
    assert affine_parameters(kronecker()) == (1, 1)
    assert affine_parameters(kronecker_triangle()) == (2, 1)
    assert affine_parameters(cycle_q(5, 3)) == (5, 3)
    assert affine_parameters(cycle_q(1, 3)) == (3, 1)
    moved = random_mutation(cycle_q(2, 2), 3, np.random.default_rng(3))
    assert affine_parameters(moved) == (2, 2)


def test_affine_parameters_rejects_other_classes():
    try:
        affine_parameters(linear(3))
    except UnsupportedClass:
        pass
    else:
        assert False, "Expected UnsupportedClass"


def test_min_length_values():
    assert min_length(linear(4)) == 4
    assert min_length(oriented_cycle(3)) == 4
    assert min_length(bowtie()) == 7
    assert min_length(type_I_with_cycle()) == 6
    assert min_length(type_II_core()) == 5
    assert min_length(oriented_cycle(4)) == 6
    assert min_length(type_iv_quiver()) == 18
    assert min_length(branched_affine()) == 21
    assert min_length(large_affine()) == 38
    assert min_length(kronecker()) == 2


def test_formula_breakdown():
    assert formula_breakdown(linear(3)) == {"n": 3}
    assert formula_breakdown(type_I_with_cycle()) == {"n": 5, "three_cycles": 1}
    assert formula_breakdown(type_II_core()) == {"n": 4}
    assert formula_breakdown(type_iv_quiver()) == {"n": 11, "deg4": 2, "k": 7}
    assert formula_breakdown(branched_affine()) == {"n": 16, "three_cycles": 5}


def test_unknown_has_no_formula():
    try:
        min_length(markov())
    except UnsupportedClass as exc:
        assert exc.context["tag"] == TAG_UNKNOWN
    else:
        assert False, "Expected UnsupportedClass"


def test_branch_decomposition_affine():
    found = branch_decomposition(branched_affine())
    assert found.core == (1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 14)
    assert found.branches == (((1,), 1), ((10, 11, 12, 13), 10), ((14, 15, 16), 14))
    assert found.length(branched_affine(), 8 + 3 + 3) == 21


def test_branch_decomposition_prunes_type_A():
    found = branch_decomposition(bowtie())
    assert len(found.core) == 1
    assert found.length(bowtie(), 1) == 7


def test_min_length_invariant_under_relabelling():
    quiver = type_iv_quiver()
    perm = {v: (v * 5) % 11 + 1 for v in quiver.vertices}
    assert sorted(perm.values()) == list(quiver.vertices)
    moved = quiver.relabel(perm)
    assert classify(moved).tag == "D_IV"
    assert min_length(moved) == 18


@pytest.mark.slow
def test_formula_matches_search_on_finite_classes():
    for start in (linear(5), star_d4(), q(5, (1, 3), (2, 3), (3, 4), (4, 5))):
        for quiver in mutation_class(start):
            expected = min_length(quiver)
            certificate = shortest_mgs(quiver, depth_bound=expected)
            assert certificate.minimal_length == expected, quiver
            assert certificate.exhaustive
