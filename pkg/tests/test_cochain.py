import random

import pytest

from gerbes.cochain import (
    Cochain,
    cohomology,
    cup,
    differential,
    is_cocycle,
    random_cocycle,
    restriction,
    solve_coboundary,
)
from gerbes.errors import DegreeTooHigh, NotACocycle, SizeBound
from gerbes.groups import Subgroup, cyclic_group, dihedral_group, klein_four_group, symmetric_group
from gerbes.modules import Pairing, cyclic_module, trivial_module


def test_differential_trivial_cases():
    z2 = cyclic_group(2)
    m = trivial_module(z2, (2,))
    zero = Cochain.zero(m, 1)
    assert differential(zero).is_zero()
    const = Cochain(m, 0, [(1,)])
    assert differential(const).is_zero()  # g.m - m = 0 for trivial action
    c = Cochain(m, 1, [(1,)])
    assert differential(c).is_zero()  # the nontrivial 1-cocycle on Z/2


def test_differential_degree_cap():
    z2 = cyclic_group(2)
    m = trivial_module(z2, (2,))
    c3 = Cochain.zero(m, 3)
    with pytest.raises(DegreeTooHigh):
        differential(c3)
    assert is_cocycle(c3)


def test_cohomology_known_values():
    z2 = cyclic_group(2)
    z3 = cyclic_group(3)
    assert cohomology(trivial_module(z2, (2,)), 1).factors == (2,)
    assert cohomology(trivial_module(z3, (2,)), 1).factors == ()
    assert cohomology(trivial_module(z2, (2,)), 2).factors == (2,)
    assert cohomology(trivial_module(z2, (2,)), 0).factors == (2,)
    m = cyclic_module(cyclic_group(4), 3, {1: 2, 3: 2})
    assert cohomology(m, 0).factors == ()  # no invariants under inversion


def test_cohomology_size_bound():
    g = cyclic_group(6)
    with pytest.raises(SizeBound):
        cohomology(trivial_module(g, (2,)), 2, max_order=4)


def test_trivial_group_and_trivial_module_edges():
    one = cyclic_group(1)
    m = trivial_module(one, (4,))
    assert cohomology(m, 0).factors == (4,)
    assert cohomology(m, 1).factors == ()
    assert cohomology(m, 2).factors == ()
    zero_mod = trivial_module(cyclic_group(2), ())
    assert cohomology(zero_mod, 1).factors == ()
    assert cohomology(zero_mod, 1).reduce(Cochain.zero(zero_mod, 1)) == ()


def test_reduce_is_homomorphism_and_coboundary_invariant():
    rng = random.Random(7)
    g = dihedral_group(4)
    m = trivial_module(g, (4,))
    h2 = cohomology(m, 2)
    for _ in range(20):
        z1 = random_cocycle(h2, rng)
        z2 = random_cocycle(h2, rng)
        assert h2.reduce(z1 + z2) == tuple(
            (a + b) % d for a, b, d in zip(h2.reduce(z1), h2.reduce(z2), h2.factors)
        )
        c = Cochain.random(m, 1, rng)
        assert h2.reduce(z1 + differential(c)) == h2.reduce(z1)
    with pytest.raises(NotACocycle):
        while True:
            c = Cochain.random(m, 2, rng)
            if not is_cocycle(c):
                h2.reduce(c)
                break


def test_representatives_reduce_to_basis():
    m = trivial_module(dihedral_group(4), (2, 2))
    h = cohomology(m, 2)
    for i, rep in enumerate(h.representatives):
        want = tuple(1 if j == i else 0 for j in range(len(h.factors)))
        assert h.reduce(rep) == want


def test_restriction_examples():
    z4 = cyclic_group(4)
    m = trivial_module(z4, (2,))
    h2 = cohomology(m, 2)
    gen = h2.representatives[0]
    sub = Subgroup(z4, (0, 2))
    res = restriction(gen, sub)
    loc = cohomology(res.module, 2)
    assert loc.reduce(res) == (1,)
    triv_res = restriction(gen, Subgroup.trivial(z4))
    assert triv_res.is_zero()
    whole = restriction(gen, Subgroup.whole(z4))
    assert whole.values == gen.values


def test_cup_examples():
    z2 = cyclic_group(2)
    m = trivial_module(z2, (2,))
    pair = Pairing(m, m, m, [[(1,)]])
    x = cohomology(m, 1).representatives[0]
    assert cohomology(m, 2).reduce(cup(x, x, pair)) == (1,)
    zero = Cochain.zero(m, 1)
    assert cup(zero, x, pair).is_zero()
    assert cup(x, zero, pair).is_zero()
    # Degree-0 cup acts pointwise.
    c0 = Cochain(m, 0, [(1,)])
    assert cup(c0, x, pair).values == x.values
    with pytest.raises(DegreeTooHigh):
        cup(cup(x, x, pair), cup(x, x, pair), pair)


def test_cup_descends_to_classes():
    rng = random.Random(11)
    g = klein_four_group()
    m = trivial_module(g, (2,))
    pair = Pairing(m, m, m, [[(1,)]])
    h1 = cohomology(m, 1)
    h2 = cohomology(m, 2)
    for _ in range(15):
        a = random_cocycle(h1, rng)
        b = random_cocycle(h1, rng)
        c = Cochain.random(m, 0, rng)
        assert h2.reduce(cup(a + differential(c), b, pair)) == h2.reduce(cup(a, b, pair))


def test_solve_coboundary_examples():
    rng = random.Random(3)
    g = symmetric_group(3)
    m = trivial_module(g, (4,))
    zero = Cochain.zero(m, 2)
    res = solve_coboundary(zero)
    assert res.primitive is not None and res.primitive.is_zero()
    # A nontrivial class has no primitive and certifies itself.
    z2m = trivial_module(cyclic_group(2), (2,))
    gen = cohomology(z2m, 2).representatives[0]
    out = solve_coboundary(gen)
    assert out.primitive is None
    assert out.certificate.class_coords == (1,)
    # Round trips at every degree, including 3.
    for deg in (1, 2, 3):
        for _ in range(5):
            c0 = Cochain.random(m, deg - 1, rng)
            y = differential(c0, _internal=True)
            got = solve_coboundary(y)
            assert got.primitive is not None
            assert differential(got.primitive, _internal=True) == y
    with pytest.raises(NotACocycle):
        while True:
            c = Cochain.random(m, 2, rng)
            if not is_cocycle(c):
                solve_coboundary(c)
                break


def test_degree3_certificate_is_congruence_based():
    z2 = cyclic_group(2)
    m = trivial_module(z2, (2,))
    x = cohomology(m, 1).representatives[0]
    pair = Pairing(m, m, m, [[(1,)]])
    u = cup(cup(x, x, pair), x, pair)  # x^3 != 0 in H^3(Z/2, Z/2)
    assert is_cocycle(u)
    out = solve_coboundary(u)
    assert out.primitive is None
    assert out.certificate.degree == 3
    assert out.certificate.class_coords is None
    assert out.certificate.congruences


def test_dd_zero_with_twisted_action():
    rng = random.Random(5)
    g = cyclic_group(4)
    m = cyclic_module(g, 8, {1: 7, 2: 1, 3: 7})
    for deg in (0, 1, 2):
        for _ in range(25):
            assert is_cocycle(differential(Cochain.random(m, deg, rng)))


def test_dd_zero_exhaustive_on_small_groups():
    """d.d vanishes as an operator: the composed matrices are zero mod the
    carrier, which covers every cochain at once (d is linear)."""
    import numpy as np

    from gerbes.cochain import _differential_matrix
    from gerbes.fixtures import oracle_groups, oracle_modules

    for _, group in oracle_groups():
        q = group.order - 1
        for _, module in oracle_modules(group):
            factors = np.asarray(module.carrier.factors, dtype=np.int64)
            for deg in (0, 1, 2):
                up = _differential_matrix(module, deg + 1)
                down = _differential_matrix(module, deg)
                prod = up @ down
                moduli = np.tile(factors, q ** (deg + 2))
                assert not (prod % moduli[:, None]).any(), (group.name, deg)
