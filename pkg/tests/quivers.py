"""Quivers shared by the test modules."""

from src.greenseq.quiver_core import Quiver


def q(n, *arrows):
    return Quiver(n, tuple((s, t, 1) for s, t in arrows))


def linear(n):
    return Quiver(n, tuple((i, i + 1, 1) for i in range(1, n)))


def oriented_cycle(n):
    return Quiver(n, tuple((i, i % n + 1, 1) for i in range(1, n + 1)))


def kronecker():
    return Quiver(2, ((1, 2, 2),))


def star_d4():
    return q(4, (1, 3), (2, 3), (3, 4))


def cycle_q(along, against):
    """Acyclic non-oriented cycle with ``along`` arrows one way round and ``against`` the other."""
    n = along + against
    arrows = [(i, i + 1) for i in range(1, along + 1)]
    rest = list(range(along + 1, n + 1)) + [1]
    for u, v in zip(rest, rest[1:]):
        arrows.append((v, u))
    return q(n, *arrows)


def eleven_vertex_sum():
    return q(
        11,
        (2, 1), (1, 3), (1, 5), (1, 8), (1, 11), (4, 2), (3, 4), (3, 8), (4, 9),
        (4, 11), (6, 5), (7, 6), (6, 8), (8, 7), (8, 9), (9, 10), (11, 9), (10, 11),
    )


def branched_affine():
    return q(
        16,
        (2, 1), (1, 3), (3, 2), (7, 2), (3, 4), (5, 4), (4, 10), (5, 6), (10, 5), (9, 6), (6, 14),
        (7, 8), (8, 9), (14, 9), (10, 11), (11, 12), (13, 11), (12, 13), (14, 15), (16, 14), (15, 16),
    )


def large_affine():
    return q(
        27,
        (3, 1), (1, 10), (2, 3), (10, 3), (3, 18), (18, 2), (4, 17), (22, 4), (7, 5), (5, 19),
        (6, 7), (9, 6), (7, 9), (19, 7), (8, 9), (16, 8), (9, 16), (10, 11), (11, 12), (12, 13),
        (25, 12), (13, 14), (24, 13), (13, 25), (14, 15), (14, 24), (15, 16), (23, 15), (16, 23), (19, 20),
        (20, 21), (27, 20), (21, 27), (21, 22), (17, 18), (26, 17), (17, 22), (18, 26),
    )


def type_iv_quiver():
    # a1..a7 = 1..7, b1, b2, b3, b6 = 8, 9, 10, 11
    return q(
        11,
        (8, 1), (1, 2), (7, 1), (2, 8), (9, 2), (2, 3), (3, 9), (10, 3),
        (3, 4), (4, 10), (4, 5), (5, 6), (11, 6), (6, 7), (7, 11),
    )


def kronecker_triangle():
    # double arrow 1 => 2 closed into a 3-cycle through 3
    return Quiver(3, ((1, 2, 2), (2, 3, 1), (3, 1, 1)))
