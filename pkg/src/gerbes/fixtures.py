"""Deterministic fixtures shared by the test suite, selftest, and CLI docs.

Everything here is built from scratch on first use and cached, so object
identity is stable within a process and all outputs are reproducible.
"""

from __future__ import annotations

from functools import lru_cache

from .arith import ArithmeticModel, Place
from .cochain import Cochain, cohomology
from .finab import QmodZ
from .gerbe import (
    GerbeExtension,
    extension_from_cocycle,
    semidirect_extension,
)
from .groups import (
    FiniteGroup,
    GroupHom,
    Subgroup,
    alternating_group,
    cyclic_group,
    dihedral_group,
    klein_four_group,
    quaternion_group,
    quotient_group,
    sl2_f5,
    symmetric_group,
)
from .modules import GModule, cyclic_module, trivial_module


@lru_cache(maxsize=None)
def oracle_groups() -> tuple[tuple[str, FiniteGroup], ...]:
    """The nine fixture groups of order <= 8 used by the cohomology oracle."""
    return (
        ("Z2", cyclic_group(2)),
        ("Z3", cyclic_group(3)),
        ("Z4", cyclic_group(4)),
        ("V4", klein_four_group()),
        ("Z6", cyclic_group(6)),
        ("S3", symmetric_group(3)),
        ("Z8", cyclic_group(8)),
        ("D4", dihedral_group(4)),
        ("Q8", quaternion_group()),
    )


ORACLE_MODULE_FACTORS: tuple[tuple[str, tuple[int, ...]], ...] = (
    ("Z2", (2,)),
    ("Z3", (3,)),
    ("Z4", (4,)),
    ("Z2xZ2", (2, 2)),
)


def oracle_modules(group: FiniteGroup) -> list[tuple[str, GModule]]:
    return [(name, trivial_module(group, f)) for name, f in ORACLE_MODULE_FACTORS]


@lru_cache(maxsize=None)
def galois_c4() -> FiniteGroup:
    return cyclic_group(4)


@lru_cache(maxsize=None)
def galois_z2() -> FiniteGroup:
    return cyclic_group(2)


@lru_cache(maxsize=None)
def mu8_inverse() -> GModule:
    """Z/8 over C4 with the generator acting by -1."""
    return cyclic_module(galois_c4(), 8, {1: 7, 2: 1, 3: 7}, name="mu8(-1)")


@lru_cache(maxsize=None)
def mu4_inverse() -> GModule:
    """Z/4 over C4 with the generator acting by -1."""
    return cyclic_module(galois_c4(), 4, {1: 3, 2: 1, 3: 3}, name="mu4(-1)")


def _c4_half_plane() -> Subgroup:
    return Subgroup(galois_c4(), (0, 2))


@lru_cache(maxsize=None)
def witness_model() -> ArithmeticModel:
    """C4 model with a free invariant slot at the index-2 place, inv = 1/2.

    H^2(C4, Z/8(-1)) restricts to zero on the subgroup of squares, so
    reciprocity allows the nonzero assignment; this is what makes a nonzero
    Brauer-Manin value reachable at all.
    """
    g = galois_c4()
    return ArithmeticModel(
        g,
        mu8_inverse(),
        [
            Place("p1", _c4_half_plane(), (QmodZ.make(1, 2),)),
            Place("p2", _c4_half_plane(), (QmodZ.zero(),)),
            Place("p3", Subgroup.trivial(g), ()),
        ],
    )


@lru_cache(maxsize=None)
def witness_model_zero() -> ArithmeticModel:
    """Same shape as witness_model but with all invariants zero."""
    g = galois_c4()
    return ArithmeticModel(
        g,
        mu8_inverse(),
        [
            Place("p1", _c4_half_plane(), (QmodZ.zero(),)),
            Place("p3", Subgroup.trivial(g), ()),
        ],
    )


@lru_cache(maxsize=None)
def witness_model_mu4() -> ArithmeticModel:
    """C4 model over Z/4(-1) with inv = 1/2 at the index-2 place."""
    g = galois_c4()
    return ArithmeticModel(
        g,
        mu4_inverse(),
        [
            Place("p1", _c4_half_plane(), (QmodZ.make(1, 2),)),
            Place("p2", Subgroup.trivial(g), ()),
        ],
    )


def _carry_cocycle(module: GModule, step: int) -> Cochain:
    """The central 2-cocycle (g^i, g^j) -> step * [i + j >= 4] over C4."""
    def fn(t: tuple[int, ...]) -> tuple[int, ...]:
        i, j = t
        return (step if i + j >= 4 else 0,)

    return Cochain.from_function(module, 2, fn)


@lru_cache(maxsize=None)
def mh_witness_extension() -> GerbeExtension:
    """Central extension of C4 by Z/8 with factor set 2*[carry]; nonsplit,
    locally split at the index-2 subgroup, and with nonzero m_H over
    witness_model()."""
    a_mod = trivial_module(galois_c4(), (8,), name="Z8")
    return extension_from_cocycle(_carry_cocycle(a_mod, 2))


@lru_cache(maxsize=None)
def mh_witness_small_extension() -> GerbeExtension:
    """Order-16 variant: central extension of C4 by Z/4 with factor set
    2*[carry]; the first witness found by the fixture search."""
    a_mod = trivial_module(galois_c4(), (4,), name="Z4")
    return extension_from_cocycle(_carry_cocycle(a_mod, 2))


@lru_cache(maxsize=None)
def split_z8_extension() -> GerbeExtension:
    """The split counterpart of mh_witness_extension."""
    return semidirect_extension(cyclic_group(8), galois_c4())


@lru_cache(maxsize=None)
def s3_gerbe() -> GerbeExtension:
    """S3 x C4 as a (necessarily split) extension of C4 by S3."""
    return semidirect_extension(symmetric_group(3), galois_c4())


def _q8_order4_automorphism() -> list[int]:
    # i -> j, j -> -i, k -> k; an order-4 outer representative.
    return [0, 1, 4, 5, 3, 2, 6, 7]


@lru_cache(maxsize=None)
def q8_semidirect_gerbe() -> GerbeExtension:
    """Q8 x| C4 through an order-4 automorphism (twists H^ab = V4)."""
    q8 = quaternion_group()
    alpha = _q8_order4_automorphism()
    powers = [list(range(8))]
    for _ in range(3):
        powers.append([alpha[x] for x in powers[-1]])
    return semidirect_extension(q8, galois_c4(), powers)


@lru_cache(maxsize=None)
def q8_product_gerbe() -> GerbeExtension:
    """Q8 x C4 with trivial action; Sha^1 of its dual is (Z/2)^2 here."""
    return semidirect_extension(quaternion_group(), galois_c4())


@lru_cache(maxsize=None)
def a5_gerbe() -> GerbeExtension:
    """A5 x C4: a perfect band, so dual data and Br_a vanish."""
    return semidirect_extension(alternating_group(5), galois_c4())


@lru_cache(maxsize=None)
def sl25_gerbe() -> GerbeExtension:
    """SL(2,5) x Z/2: the second perfect-band fixture."""
    return semidirect_extension(sl2_f5(), galois_z2())


@lru_cache(maxsize=None)
def z4_extension_of_z2() -> GerbeExtension:
    """1 -> Z/2 -> Z/4 -> Z/2 -> 1 (the nonsplit class)."""
    z2, z4 = galois_z2(), cyclic_group(4)
    return GerbeExtension(
        GroupHom(z4, z2, [0, 1, 0, 1]), GroupHom(cyclic_group(2), z4, [0, 2])
    )


@lru_cache(maxsize=None)
def klein_extension_of_z2() -> GerbeExtension:
    """1 -> Z/2 -> V4 -> Z/2 -> 1 (the split class)."""
    z2, v4 = galois_z2(), klein_four_group()
    return GerbeExtension(
        GroupHom(v4, z2, [0, 1, 0, 1]), GroupHom(cyclic_group(2), v4, [0, 2])
    )


@lru_cache(maxsize=None)
def q8_over_v4_gerbe() -> GerbeExtension:
    """Q8 as an extension of the Klein four-group by its center."""
    q8 = quaternion_group()
    v4q, proj_map = quotient_group(q8, Subgroup(q8, (0, 1)))
    return GerbeExtension(
        GroupHom(q8, v4q, list(proj_map)), GroupHom(cyclic_group(2), q8, [0, 1])
    )


@lru_cache(maxsize=None)
def pairing_model() -> ArithmeticModel:
    """Two full places over Z/2 with opposite invariants 1/2 each."""
    z2 = galois_z2()
    mu2 = cyclic_module(z2, 2)
    whole = Subgroup.whole(z2)
    return ArithmeticModel(
        z2,
        mu2,
        [Place("v1", whole, (QmodZ.make(1, 2),)), Place("v2", whole, (QmodZ.make(1, 2),))],
    )


@lru_cache(maxsize=None)
def h3_obstruction_model() -> ArithmeticModel:
    """Only a trivial place: Sha^1 is all of H^1 and H^3 can obstruct."""
    z2 = galois_z2()
    return ArithmeticModel(z2, cyclic_module(z2, 2), [Place("t", Subgroup.trivial(z2), ())])


@lru_cache(maxsize=None)
def bad_reciprocity_model() -> ArithmeticModel:
    """Single full place with inv = 1/2: A2 must reject this."""
    z2 = galois_z2()
    return ArithmeticModel(
        z2,
        cyclic_module(z2, 2),
        [Place("v", Subgroup.whole(z2), (QmodZ.make(1, 2),))],
    )


@lru_cache(maxsize=None)
def gw_module() -> GModule:
    """Z/8 over the Klein four-group with the full unit action.

    The classical kernel witness: every class of H^1 is locally trivial on
    all three order-2 subgroups, yet H^1 = Z/2.
    """
    return cyclic_module(klein_four_group_shared(), 8, {1: 3, 2: 5, 3: 7}, name="Z8units")


@lru_cache(maxsize=None)
def klein_four_group_shared() -> FiniteGroup:
    return klein_four_group()


@lru_cache(maxsize=None)
def gw_model() -> ArithmeticModel:
    """All-cyclic-places model over the Klein four-group (A3 holds)."""
    v4 = klein_four_group_shared()
    mu = cyclic_module(v4, 8)
    places = []
    for i, elems in enumerate(((0, 1), (0, 2), (0, 3))):
        sub = Subgroup(v4, elems)
        n = len(cohomology(mu.restrict(sub), 2).factors)
        places.append(Place(f"q{i}", sub, tuple(QmodZ.zero() for _ in range(n))))
    return ArithmeticModel(v4, mu, places, chebotarev_complete=True)


def thm41_fixture_matrix() -> list[tuple[str, GerbeExtension, ArithmeticModel]]:
    """(name, extension, model) pairs exercised by the factorization check."""
    return [
        ("s3/model-half", s3_gerbe(), witness_model()),
        ("s3/model-zero", s3_gerbe(), witness_model_zero()),
        ("q8-semidirect/model-half", q8_semidirect_gerbe(), witness_model()),
        ("q8-semidirect/model-zero", q8_semidirect_gerbe(), witness_model_zero()),
        ("q8-product/model-half", q8_product_gerbe(), witness_model()),
        ("q8-product/model-zero", q8_product_gerbe(), witness_model_zero()),
        ("z8-witness/model-half", mh_witness_extension(), witness_model()),
        ("z4-witness/model-mu4", mh_witness_small_extension(), witness_model_mu4()),
    ]


def split_fixture_matrix() -> list[tuple[str, GerbeExtension, ArithmeticModel]]:
    """Globally split extensions over axiom-valid models (m_H must vanish)."""
    return [
        ("z8-split/model-half", split_z8_extension(), witness_model()),
        ("z8-split/model-zero", split_z8_extension(), witness_model_zero()),
        ("s3/model-half", s3_gerbe(), witness_model()),
        ("q8-semidirect/model-half", q8_semidirect_gerbe(), witness_model()),
        ("q8-product/model-zero", q8_product_gerbe(), witness_model_zero()),
        ("klein/pairing-model", klein_extension_of_z2(), pairing_model()),
    ]
