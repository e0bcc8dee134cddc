"""Finite stand-in for a number field: places, invariant maps, Sha kernels.

An :class:`ArithmeticModel` is a Galois group G, a cyclic coefficient
module mu (roots of unity with an optional character action), and a list
of places.  Each place is a decomposition subgroup D_v together with an
invariant map into Q/Z, specified by its values on the canonical
generators of H^2(D_v, mu).  The axioms:

  A1  each value's order divides its generator's order (inv_v is a
      homomorphism);
  A2  reciprocity: global H^2(G, mu) classes have invariant sum zero;
  A3  (optional) every cyclic subgroup of G lies in some D_v.

A2 is exactly what makes the Brauer-Manin sum independent of all choices,
and A3 is the Chebotarev-style completeness flag: with it, the computed
Sha is the kernel over all cyclic subgroups; an actual number field ranges
over all places, so faithfulness is the model author's responsibility.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import lcm
from typing import Sequence

import numpy as np

from .cochain import Cochain, CohomologyGroup, cohomology, restriction, solve_coboundary
from .errors import GerbesError, InputError, ModelAxiomFailure, SearchSpaceExceeded
from .finab import QmodZ
from .groups import FiniteGroup, Subgroup, cyclic_subgroups
from .linalg import hermite_column_basis, kernel_mod, snf, solve_column_basis
from .modules import GModule


@dataclass(frozen=True)
class Place:
    """A named place: decomposition subgroup plus invariant-map values.

    ``inv[i]`` is the image in Q/Z of the i-th canonical generator of
    H^2(D_v, mu restricted to D_v).
    """

    name: str
    subgroup: Subgroup
    inv: tuple[QmodZ, ...]


class ArithmeticModel:
    """G, mu, and places; caches all local cohomology it touches."""

    def __init__(
        self,
        group: FiniteGroup,
        mu: GModule,
        places: Sequence[Place],
        chebotarev_complete: bool = False,
        max_order: int = 64,
    ) -> None:
        if mu.group is not group:
            raise InputError("mu must be a module over the model's Galois group")
        if not mu.is_cyclic or mu.rank == 0:
            raise InputError("mu must have a cyclic carrier Z/m with m >= 2")
        self.group = group
        self.mu = mu
        self.places = tuple(places)
        self.chebotarev_complete = bool(chebotarev_complete)
        self.max_order = max_order
        names = [p.name for p in self.places]
        if len(set(names)) != len(names):
            raise InputError("place names must be distinct")
        for p in self.places:
            if p.subgroup.parent is not group:
                raise InputError(f"place {p.name!r} subgroup belongs to a different group")
            h2 = self.local_h2(p)
            if len(p.inv) != len(h2.factors):
                raise InputError(
                    f"place {p.name!r} assigns {len(p.inv)} invariant values, "
                    f"but H^2(D_v, mu) has {len(h2.factors)} generators"
                )

    def local_mu(self, place: Place) -> GModule:
        return self.mu.restrict(place.subgroup)

    def local_h2(self, place: Place) -> CohomologyGroup:
        return cohomology(self.local_mu(place), 2, max_order=self.max_order)

    def global_h2(self) -> CohomologyGroup:
        return cohomology(self.mu, 2, max_order=self.max_order)

    @property
    def modulus(self) -> int:
        return self.mu.carrier.factors[0]

    def inv_eval(self, place: Place, z: Cochain) -> QmodZ:
        """inv_v of a 2-cocycle on D_v with mu coefficients (linear in z)."""
        h2 = self.local_h2(place)
        coords = h2.reduce(z)
        total = QmodZ.zero()
        for c, val in zip(coords, place.inv):
            total = total + val.scaled(int(c))
        return total

    def restrict_to_place(self, z: Cochain, place: Place) -> Cochain:
        return restriction(z, place.subgroup)

    def __repr__(self) -> str:
        return f"ArithmeticModel({self.group!r}, mu=Z/{self.modulus}, {len(self.places)} places)"


@dataclass(frozen=True)
class A1Entry:
    place: str
    generator: int
    generator_order: int
    value: QmodZ
    ok: bool


@dataclass(frozen=True)
class A2Entry:
    generator: int
    contributions: tuple[tuple[str, QmodZ], ...]
    total: QmodZ
    ok: bool


@dataclass(frozen=True)
class A3Entry:
    checked: bool
    uncovered: tuple[tuple[int, ...], ...]

    @property
    def ok(self) -> bool:
        return not self.checked or not self.uncovered


@dataclass(frozen=True)
class AxiomReport:
    a1: tuple[A1Entry, ...]
    a2: tuple[A2Entry, ...]
    a3: A3Entry

    @property
    def passed(self) -> bool:
        return all(e.ok for e in self.a1) and all(e.ok for e in self.a2) and self.a3.ok

    def summary(self) -> str:
        bad1 = [e for e in self.a1 if not e.ok]
        bad2 = [e for e in self.a2 if not e.ok]
        parts = []
        parts.append("A1 " + ("ok" if not bad1 else f"FAIL at {[(e.place, e.generator) for e in bad1]}"))
        parts.append(
            "A2 " + ("ok" if not bad2 else f"FAIL at generators {[e.generator for e in bad2]}")
        )
        if self.a3.checked:
            parts.append("A3 " + ("ok" if self.a3.ok else f"FAIL, uncovered {list(self.a3.uncovered)}"))
        else:
            parts.append("A3 skipped")
        return "; ".join(parts)


def inv_eval(model: ArithmeticModel, place: Place, z: Cochain) -> QmodZ:
    """Local invariant of a 2-cocycle at a place (see ArithmeticModel.inv_eval)."""
    return model.inv_eval(place, z)


def check_axioms(model: ArithmeticModel) -> AxiomReport:
    """Evaluate A1, A2, A3; failures become report entries, not exceptions."""
    a1 = []
    for p in model.places:
        h2 = model.local_h2(p)
        for i, (d, val) in enumerate(zip(h2.factors, p.inv)):
            a1.append(A1Entry(p.name, i, d, val, d % val.order == 0))
    a2 = []
    glob = model.global_h2()
    for j, rep in enumerate(glob.representatives):
        contributions = []
        total = QmodZ.zero()
        for p in model.places:
            res = model.restrict_to_place(rep, p)
            val = model.inv_eval(p, res)
            contributions.append((p.name, val))
            total = total + val
        a2.append(A2Entry(j, tuple(contributions), total, total.is_zero()))
    if model.chebotarev_complete:
        uncovered = []
        for sub in cyclic_subgroups(model.group):
            if not any(p.subgroup.contains(sub) for p in model.places):
                uncovered.append(sub.elements)
        a3 = A3Entry(True, tuple(uncovered))
    else:
        a3 = A3Entry(False, ())
    return AxiomReport(tuple(a1), tuple(a2), a3)


def require_axioms(model: ArithmeticModel) -> AxiomReport:
    report = check_axioms(model)
    if not report.passed:
        raise ModelAxiomFailure(report)
    return report


@dataclass(frozen=True)
class ShaGenerator:
    """One generator of Sha with its certificates of local triviality."""

    order: int
    ambient_coords: tuple[int, ...]
    cochain: Cochain
    local_primitives: tuple[tuple[str, Cochain], ...]


@dataclass(frozen=True)
class ShaResult:
    degree: int
    ambient: CohomologyGroup
    factors: tuple[int, ...]
    generators: tuple[ShaGenerator, ...]

    @property
    def order(self) -> int:
        n = 1
        for d in self.factors:
            n *= d
        return n


def sha(model: ArithmeticModel, module: GModule, degree: int) -> ShaResult:
    """ker( H^degree(G, M) -> prod_v H^degree(D_v, M) ) with certificates.

    Computed by integer linear algebra on class coordinates; the kernel
    lattice is put into canonical Hermite form first, so the output does
    not depend on the order in which places are listed.
    """
    if degree not in (1, 2):
        raise InputError("sha is computed in degrees 1 and 2")
    if module.group is not model.group:
        raise InputError("module must live over the model's Galois group")
    amb = cohomology(module, degree, max_order=model.max_order)
    r = len(amb.factors)
    if r == 0:
        return ShaResult(degree, amb, (), ())

    rows: list[list[int]] = []
    moduli: list[int] = []
    for p in model.places:
        loc = cohomology(module.restrict(p.subgroup), degree, max_order=model.max_order)
        res_coords = [
            loc.reduce(restriction(amb.representatives[j], p.subgroup)) for j in range(r)
        ]
        for i, d in enumerate(loc.factors):
            rows.append([int(res_coords[j][i]) for j in range(r)])
            moduli.append(d)

    if rows:
        e = lcm(*moduli)
        scaled = np.asarray(
            [[(e // m) * x for x in row] for row, m in zip(rows, moduli)], dtype=np.int64
        )
        kern = kernel_mod(scaled % e, e)
        raw_basis = kern.basis_matrix()
        generators = [[raw_basis[i][j] for i in range(r)] for j in range(r)]
    else:
        generators = [[1 if i == j else 0 for i in range(r)] for j in range(r)]
    basis = hermite_column_basis(generators)

    rel_cols = []
    for j, h in enumerate(amb.factors):
        col = [0] * r
        col[j] = h
        rel_cols.append(solve_column_basis(basis, col))
    c_matrix = [[rel_cols[j][i] for j in range(r)] for i in range(r)]
    res = snf(c_matrix)
    diag = [res.diagonal_at(i) for i in range(r)]
    if any(d == 0 for d in diag):
        raise GerbesError("sha quotient has a free part; relations are missing")
    positions = [i for i, d in enumerate(diag) if d >= 2]
    factors = tuple(diag[i] for i in positions)

    basis_cols = [list(col) for col in basis]
    gens = []
    for p_idx in positions:
        coeff = [res.U_inv[i][p_idx] for i in range(r)]
        vec = [sum(basis_cols[j][i] * coeff[j] for j in range(r)) for i in range(r)]
        coords = tuple(v % h for v, h in zip(vec, amb.factors))
        z = amb.cochain_from_coords(coords)
        prims = []
        for p in model.places:
            resz = restriction(z, p.subgroup)
            solved = solve_coboundary(resz, max_order=model.max_order)
            if solved.primitive is None:
                raise GerbesError(
                    f"sha generator is not locally trivial at place {p.name!r}"
                )
            prims.append((p.name, solved.primitive))
        gens.append(ShaGenerator(diag[p_idx], coords, z, tuple(prims)))
    return ShaResult(degree, amb, factors, tuple(gens))


def search_inv_assignments(
    group: FiniteGroup,
    mu: GModule,
    subgroups: Sequence[Subgroup],
    bound: int = 1_000_000,
    chebotarev_complete: bool = False,
    max_order: int = 64,
) -> list[ArithmeticModel]:
    """All A1+A2-consistent invariant assignments on the given places.

    Each generator of H^2(D_v, mu) ranges over the cyclic subgroup of Q/Z
    of its own order; candidates are enumerated in lexicographic order and
    filtered by reciprocity.  Raises SearchSpaceExceeded when the raw
    product of ranges passes ``bound``.
    """
    zero_model = ArithmeticModel(
        group,
        mu,
        [
            Place(f"v{i}", sub, tuple(QmodZ.zero() for _ in cohomology(mu.restrict(sub), 2, max_order=max_order).factors))
            for i, sub in enumerate(subgroups)
        ],
        chebotarev_complete=chebotarev_complete,
        max_order=max_order,
    )
    slots: list[tuple[int, int]] = []  # (place index, generator order)
    for i, p in enumerate(zero_model.places):
        for d in zero_model.local_h2(p).factors:
            slots.append((i, d))
    total = 1
    for _, d in slots:
        total *= d
        if total > bound:
            raise SearchSpaceExceeded(
                f"assignment space exceeds the bound {bound}"
            )

    glob = zero_model.global_h2()
    res_coords: list[list[tuple[int, int]]] = []  # per global gen: (slot, coefficient)
    for rep in glob.representatives:
        entry: list[tuple[int, int]] = []
        slot = 0
        for p in zero_model.places:
            loc = zero_model.local_h2(p)
            coords = loc.reduce(restriction(rep, p.subgroup))
            for c in coords:
                entry.append((slot, int(c)))
                slot += 1
        res_coords.append(entry)

    models = []
    for combo in itertools.product(*(range(d) for _, d in slots)):
        ok = True
        for entry in res_coords:
            total_q = QmodZ.zero()
            for slot, c in entry:
                a = combo[slot]
                d = slots[slot][1]
                total_q = total_q + QmodZ.make(c * a, d)
            if not total_q.is_zero():
                ok = False
                break
        if not ok:
            continue
        values: list[list[QmodZ]] = [[] for _ in zero_model.places]
        for (i, d), a in zip(slots, combo):
            values[i].append(QmodZ.make(a, d))
        places = [
            Place(p.name, p.subgroup, tuple(vals))
            for p, vals in zip(zero_model.places, values)
        ]
        models.append(
            ArithmeticModel(
                group, mu, places, chebotarev_complete=chebotarev_complete, max_order=max_order
            )
        )
    return models
