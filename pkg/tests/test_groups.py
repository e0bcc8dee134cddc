import pytest

from gerbes.errors import (
    ClosureExceedsBound,
    InvalidHomomorphism,
    InvalidSubgroup,
    NoIdentity,
    NoInverse,
    NonAssociative,
)
from gerbes.groups import (
    FiniteGroup,
    GroupHom,
    Subgroup,
    abelianization,
    alternating_group,
    build_group,
    commutator_subgroup,
    cyclic_group,
    cyclic_subgroups,
    dihedral_group,
    direct_product,
    from_permutations,
    klein_four_group,
    quaternion_group,
    quotient_group,
    sl2_f5,
    symmetric_group,
)


def test_trivial_group_from_table():
    g = build_group({"table": [[0]]})
    assert g.order == 1


def test_single_three_cycle_generates_z3():
    g = from_permutations([[1, 2, 0]])
    assert g.order == 3
    assert g.element_order(1) == 3


def test_a5_from_generators_order_and_simplicity():
    g = from_permutations([[1, 2, 3, 4, 0], [1, 2, 0, 3, 4]])
    assert g.order == 60
    # Brute-force simplicity: every nontrivial normal closure is everything.
    for x in range(1, g.order):
        gens = {g.conjugate(a, x) for a in range(g.order)}
        assert Subgroup.generated_by(g, gens).order == 60


def test_table_validation_errors():
    with pytest.raises(NoIdentity):
        FiniteGroup([[1, 0], [0, 1]])
    with pytest.raises(NoInverse):
        FiniteGroup([[0, 1], [1, 1]])
    # Identity and inverses hold but associativity fails.
    with pytest.raises((NonAssociative, NoInverse)):
        FiniteGroup(
            [
                [0, 1, 2, 3, 4],
                [1, 0, 3, 4, 2],
                [2, 4, 0, 1, 3],
                [3, 2, 4, 0, 1],
                [4, 3, 1, 2, 0],
            ]
        )


def test_inverse_antihomomorphism():
    g = symmetric_group(3)
    for a in range(6):
        for b in range(6):
            assert g.inv[g.table[a][b]] == g.table[g.inv[b]][g.inv[a]]


def test_closure_bound():
    with pytest.raises(ClosureExceedsBound):
        from_permutations([[1, 2, 3, 4, 0], [1, 0, 2, 3, 4]], max_order=30)


def test_abelianization_examples():
    assert abelianization(symmetric_group(3)).target.factors == (2,)
    assert abelianization(alternating_group(5)).target.factors == ()
    ab = abelianization(cyclic_group(4))
    assert ab.target.factors == (4,)
    assert [ab.coords[x] for x in range(4)] == [(0,), (1,), (2,), (3,)]


def test_abelianization_order_agreement():
    for g in (symmetric_group(4), quaternion_group(), dihedral_group(6), sl2_f5()):
        ab = abelianization(g)
        comm = commutator_subgroup(g)
        assert ab.target.order * comm.order == g.order


def test_cyclic_subgroups_examples():
    z4 = cyclic_group(4)
    subs = cyclic_subgroups(z4)
    assert [s.elements for s in subs] == [(0,), (0, 1, 2, 3), (0, 2)]
    assert len(cyclic_subgroups(klein_four_group())) == 4
    assert len(cyclic_subgroups(symmetric_group(3))) == 5
    for s in subs:
        assert s.generator is not None
        assert Subgroup.generated_by(z4, [s.generator]).elements == s.elements


def test_subgroup_validation():
    z4 = cyclic_group(4)
    with pytest.raises(InvalidSubgroup):
        Subgroup(z4, (1, 2))
    with pytest.raises(InvalidSubgroup):
        Subgroup(z4, (0, 1))


def test_hom_validation_and_order_division():
    s3 = symmetric_group(3)
    z2 = cyclic_group(2)
    ab = abelianization(s3)
    sign = GroupHom(s3, z2, [ab.coords[x][0] for x in range(6)])
    for x in range(6):
        assert s3.element_order(x) % z2.element_order(sign(x)) == 0
    with pytest.raises(InvalidHomomorphism):
        GroupHom(s3, z2, [1, 0, 0, 0, 0, 0])
    with pytest.raises(InvalidHomomorphism):
        GroupHom(z2, z2, [0, 0, 0])


def test_quotient_group():
    q8 = quaternion_group()
    quot, proj = quotient_group(q8, Subgroup(q8, (0, 1)))
    assert quot.order == 4 and quot.is_abelian
    assert proj[0] == 0
    with pytest.raises(InvalidSubgroup):
        quotient_group(symmetric_group(3), Subgroup.generated_by(symmetric_group(3), [1]))


def test_direct_product_and_named_groups():
    v4 = klein_four_group()
    assert v4.order == 4 and all(v4.element_order(x) <= 2 for x in range(4))
    d4 = dihedral_group(4)
    assert d4.order == 8 and not d4.is_abelian
    q8 = quaternion_group()
    assert sorted(q8.element_order(x) for x in range(8)) == [1, 2, 4, 4, 4, 4, 4, 4]
    sl = sl2_f5()
    assert sl.order == 120
    assert commutator_subgroup(sl).order == 120
    g = direct_product(cyclic_group(2), cyclic_group(3))
    assert g.order == 6 and g.is_abelian


def test_permutation_labels_are_cycles():
    s3 = symmetric_group(3)
    assert s3.label(0) == "()"
    assert any("(" in s3.label(x) for x in range(1, 6))
