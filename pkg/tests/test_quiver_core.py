import numpy as np
import pytest
from hypothesis import given, settings as hsettings
from hypothesis import strategies as st

from src.greenseq.exceptions import IndexOutOfRange, IntegerOverflow, MalformedQuiver
from src.greenseq.quiver_core import (
    IceQuiver,
    Quiver,
    Seed,
    VertexColor,
    arrow_view,
    c_matrix,
    canonical_key,
    coframed,
    color,
    determinant,
    framed,
    g_from_c,
    g_mutate,
    matrix_view,
    mutate,
)


def a2():
    return Quiver(2, ((1, 2, 1),))


@st.composite
def quivers(draw, max_n=4, max_mult=2):
    n = draw(st.integers(min_value=1, max_value=max_n))
    arrows = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            b = draw(st.integers(min_value=-max_mult, max_value=max_mult))
            if b > 0:
                arrows.append((i, j, b))
            elif b < 0:
                arrows.append((j, i, -b))
    return Quiver(n, tuple(arrows))


def test_mutate_three_vertex_quiver():
    b = IceQuiver([[0, 2, 0, 0], [-2, 0, 1, 0], [0, -1, 0, -1]])
    result = mutate(b, 2)
    assert result.matrix.tolist() == [[0, -2, 2, 0], [2, 0, -1, 0], [-2, 1, 0, -1]]
    assert mutate(result, 2) == b


def test_mutate_single_arrow():
    assert mutate(IceQuiver([[0, 1], [-1, 0]]), 1).matrix.tolist() == [[0, -1], [1, 0]]


def test_mutate_rejects_frozen_and_zero_index():
    b = IceQuiver([[0, 2, 0, 0], [-2, 0, 1, 0], [0, -1, 0, -1]])
    for k in (0, 4):
        try:
            mutate(b, k)
        except IndexOutOfRange as exc:
            assert exc.context["vertex"] == k
        else:
            assert False, f"mutation at {k} should fail"


def test_ice_quiver_rejects_non_skew_principal_part():
    try:
        IceQuiver([[0, 1], [1, 0]])
    except MalformedQuiver:
        pass
    else:
        assert False


def test_mutate_overflow_is_an_error():
    big = 2**62
    b = IceQuiver([[0, big, 0], [-big, 0, big], [0, -big, 0]])
    try:
        mutate(b, 2)
    except IntegerOverflow:
        pass
    else:
        assert False


@given(quivers(), st.data())
@hsettings(max_examples=60, deadline=None)
def test_mutation_is_an_involution(quiver, data):
    k = data.draw(st.integers(min_value=1, max_value=quiver.n))
    b = framed(quiver)
    assert mutate(mutate(b, k), k) == b


def test_framed_and_coframed():
    assert framed(a2()).matrix.tolist() == [[0, 1, 1, 0], [-1, 0, 0, 1]]
    assert coframed(a2()).matrix.tolist() == [[0, 1, -1, 0], [-1, 0, 0, -1]]
    empty = framed(Quiver(3))
    assert empty.matrix[:, :3].tolist() == [[0] * 3] * 3
    assert np.array_equal(c_matrix(empty), np.eye(3, dtype=np.int64))


def test_arrow_view_kronecker_and_round_trip():
    kronecker = arrow_view(IceQuiver([[0, 2], [-2, 0]]))
    assert kronecker.arrows == ((1, 2, 2),)
    b = IceQuiver([[0, 2, 0, 0], [-2, 0, 1, 0], [0, -1, 0, -1]])
    q = arrow_view(b)
    assert q.frozen == 1
    assert (4, 3, 1) in q.arrows
    assert matrix_view(q) == b


def test_quiver_rejects_frozen_frozen_arrows_loops_and_two_cycles():
    for bad in (
        lambda: Quiver(2, ((4, 3, 1),), frozen=2),
        lambda: Quiver(2, ((1, 1, 1),)),
        lambda: Quiver(2, ((1, 2, 1), (2, 1, 1))),
    ):
        try:
            bad()
        except MalformedQuiver:
            pass
        else:
            assert False


def test_parallel_arrows_are_merged():
    q = Quiver(2, ((1, 2), (1, 2, 1)))
    assert q.arrows == ((1, 2, 2),)
    assert q.degree(1) == 2


def test_c_matrix_and_colors_after_one_mutation():
    after = mutate(framed(a2()), 1)
    assert c_matrix(after).tolist() == [[-1, 0], [0, 1]]
    assert color(after, 1) is VertexColor.RED
    assert color(after, 2) is VertexColor.GREEN


def test_colors_agree_with_frozen_arrows():
    after = mutate(mutate(framed(a2()), 2), 1)
    q = arrow_view(after)
    for k in (1, 2):
        incoming_from_frozen = any(s > 2 and t == k for s, t, _ in q.arrows)
        assert (color(after, k) is VertexColor.GREEN) == (not incoming_from_frozen)


def test_g_mutate_at_a_source():
    g = g_mutate(np.eye(2, dtype=np.int64), framed(a2()), 1)
    assert g.tolist() == [[-1, 0], [0, 1]]


def test_g_mutate_twice_restores():
    seed = Seed.initial(a2())
    back = seed.mutate(2).mutate(2)
    assert np.array_equal(back.g, seed.g)


@pytest.mark.slow
@given(quivers(max_n=4, max_mult=1), st.lists(st.integers(min_value=1, max_value=4), max_size=20))
@hsettings(max_examples=1000, deadline=None)
def test_duality_along_random_paths(quiver, path):
    seed = Seed.initial(quiver)
    for k in path:
        if k > seed.n:
            continue
        seed = seed.mutate(k)
        assert seed.duality_holds()
        assert abs(determinant(seed.c)) == 1
        assert np.array_equal(g_from_c(seed.c), seed.g)


def test_canonical_key():
    identity = np.eye(3, dtype=np.int64)
    assert canonical_key(identity) == canonical_key(identity[[2, 0, 1]])
    assert canonical_key(identity) != canonical_key(-identity)


def test_seed_green_vertices_follow_the_a2_pentagon():
    seed = Seed.initial(a2())
    assert seed.green_vertices() == [1, 2]
    seed = seed.mutate(1)
    assert seed.green_vertices() == [2]
    seed = seed.mutate(2)
    assert seed.all_red


def test_full_subquiver_and_relabel():
    q = Quiver(4, ((1, 2, 1), (2, 3, 1), (3, 4, 2)))
    sub, labels = q.full_subquiver([4, 2, 3])
    assert labels == (2, 3, 4)
    assert sub.arrows == ((1, 2, 1), (2, 3, 2))
    assert q.relabel({1: 4, 4: 1}).arrows == ((2, 3, 1), (3, 1, 2), (4, 2, 1))
    assert q.opposite().multiplicity(4, 3) == 2
    assert q.is_connected() and q.is_acyclic()
