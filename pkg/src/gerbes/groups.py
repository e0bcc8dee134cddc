"""Finite groups as explicit multiplication tables, with the identity at index 0.

Everything downstream (cochains, extensions, models) indexes group elements
by their position in the table, so all enumerations here are deterministic:
subgroups come out in lexicographic order of their sorted element sets, and
permutation closures label elements by sorted permutation tuples.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .errors import (
    ClosureExceedsBound,
    GerbesError,
    InputError,
    InvalidHomomorphism,
    InvalidSubgroup,
    NoIdentity,
    NoInverse,
    NonAssociative,
)
from .finab import FinAb, abelian_structure

FULL_ASSOCIATIVITY_BOUND = 64
ASSOCIATIVITY_SAMPLES = 20000
DEFAULT_CLOSURE_BOUND = 10080


class FiniteGroup:
    """Immutable finite group on {0, ..., order-1} with identity 0."""

    def __init__(
        self,
        table: Sequence[Sequence[int]],
        labels: Sequence[str] | None = None,
        name: str | None = None,
    ) -> None:
        n = len(table)
        if n == 0:
            raise NoIdentity("empty multiplication table")
        tab = []
        for i, row in enumerate(table):
            if len(row) != n:
                raise InputError(f"row {i} has length {len(row)}, expected {n}")
            r = tuple(int(x) for x in row)
            for x in r:
                if not 0 <= x < n:
                    raise InputError(f"table entry {x} out of range [0, {n})")
            tab.append(r)
        self.order = n
        self.table: tuple[tuple[int, ...], ...] = tuple(tab)
        self.name = name
        if labels is not None and len(labels) != n:
            raise InputError("labels length does not match group order")
        self.labels = tuple(labels) if labels is not None else None
        self.inv: tuple[int, ...] = self._validate()

    def _validate(self) -> tuple[int, ...]:
        n, tab = self.order, self.table
        for a in range(n):
            if tab[0][a] != a or tab[a][0] != a:
                raise NoIdentity(f"index 0 is not a two-sided identity at element {a}")
        inv = [-1] * n
        for a in range(n):
            for b in range(n):
                if tab[a][b] == 0 and tab[b][a] == 0:
                    inv[a] = b
                    break
            if inv[a] < 0:
                raise NoInverse(f"element {a} has no two-sided inverse")
        if n <= FULL_ASSOCIATIVITY_BOUND:
            triples: Iterable[tuple[int, int, int]] = itertools.product(range(n), repeat=3)
        else:
            rng = random.Random(n)
            triples = (
                (rng.randrange(n), rng.randrange(n), rng.randrange(n))
                for _ in range(ASSOCIATIVITY_SAMPLES)
            )
        for a, b, c in triples:
            if tab[tab[a][b]][c] != tab[a][tab[b][c]]:
                raise NonAssociative(f"({a}*{b})*{c} != {a}*({b}*{c})")
        for a in range(n):
            for b in range(n):
                if inv[tab[a][b]] != tab[inv[b]][inv[a]]:
                    raise NonAssociative(f"inverse anti-homomorphism fails at ({a}, {b})")
        return tuple(inv)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inverse(self, a: int) -> int:
        return self.inv[a]

    def conjugate(self, g: int, h: int) -> int:
        """g h g^-1."""
        return self.table[self.table[g][h]][self.inv[g]]

    def commutator(self, a: int, b: int) -> int:
        """a b a^-1 b^-1."""
        return self.table[self.conjugate(a, b)][self.inv[b]]

    def elements(self) -> range:
        return range(self.order)

    def element_order(self, a: int) -> int:
        n, x = 1, a
        while x != 0:
            x = self.table[x][a]
            n += 1
        return n

    @cached_property
    def is_abelian(self) -> bool:
        return all(
            self.table[a][b] == self.table[b][a]
            for a in range(self.order)
            for b in range(a + 1, self.order)
        )

    def label(self, a: int) -> str:
        return self.labels[a] if self.labels else str(a)

    def __repr__(self) -> str:
        tag = self.name or f"order {self.order}"
        return f"FiniteGroup({tag})"


def build_group(spec: dict, max_order: int = DEFAULT_CLOSURE_BOUND, name: str | None = None) -> FiniteGroup:
    """Build a group from a {"table": ...} or {"permutations": ...} description."""
    if "table" in spec:
        return FiniteGroup(spec["table"], labels=spec.get("labels"), name=name)
    if "permutations" in spec:
        return from_permutations(spec["permutations"], max_order=max_order, name=name)
    raise InputError("group description needs a 'table' or 'permutations' key")


def from_permutations(
    perms: Sequence[Sequence[int]],
    max_order: int = DEFAULT_CLOSURE_BOUND,
    name: str | None = None,
) -> FiniteGroup:
    """Close a set of permutations of a common finite set into a group.

    The identity gets index 0; the remaining elements are labeled in
    lexicographic order of their permutation tuples, so the table is
    reproducible regardless of generator order.
    """
    if not perms:
        raise InputError("at least one permutation generator is required")
    degree = len(perms[0])
    gens = []
    for p in perms:
        if len(p) != degree or sorted(p) != list(range(degree)):
            raise InputError(f"{p!r} is not a permutation of 0..{degree - 1}")
        gens.append(tuple(int(x) for x in p))
    ident = tuple(range(degree))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = tuple(p[g[i]] for i in range(degree))
                if q not in seen:
                    if len(seen) >= max_order:
                        raise ClosureExceedsBound(
                            f"closure exceeds the configured bound {max_order}"
                        )
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    elements = [ident] + sorted(seen - {ident})
    index = {p: i for i, p in enumerate(elements)}
    table = [
        [index[tuple(p[q[i]] for i in range(degree))] for q in elements]
        for p in elements
    ]
    labels = [_cycle_label(p) for p in elements]
    return FiniteGroup(table, labels=labels, name=name)


def _cycle_label(perm: tuple[int, ...]) -> str:
    seen = [False] * len(perm)
    parts = []
    for start in range(len(perm)):
        if seen[start] or perm[start] == start:
            seen[start] = True
            continue
        cyc = [start]
        seen[start] = True
        x = perm[start]
        while x != start:
            cyc.append(x)
            seen[x] = True
            x = perm[x]
        parts.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(parts) if parts else "()"


def cyclic_group(n: int, name: str | None = None) -> FiniteGroup:
    if n <= 0:
        raise InputError("cyclic group order must be positive")
    table = [[(a + b) % n for b in range(n)] for a in range(n)]
    return FiniteGroup(table, name=name or f"Z/{n}")


def direct_product(g: FiniteGroup, h: FiniteGroup, name: str | None = None) -> FiniteGroup:
    nal = h.order
    table = [
        [
            g.table[a1][b1] * nal + h.table[a2][b2]
            for b1 in range(g.order)
            for b2 in range(h.order)
        ]
        for a1 in range(g.order)
        for a2 in range(h.order)
    ]
    return FiniteGroup(table, name=name or f"{g.name or 'G'}x{h.name or 'H'}")


def klein_four_group() -> FiniteGroup:
    return direct_product(cyclic_group(2), cyclic_group(2), name="V4")


def symmetric_group(n: int) -> FiniteGroup:
    if n < 1:
        raise InputError("symmetric group degree must be >= 1")
    if n == 1:
        return cyclic_group(1, name="S1")
    gens = [[1, 0] + list(range(2, n))]
    if n > 2:
        gens.append(list(range(1, n)) + [0])
    return from_permutations(gens, max_order=math_factorial(n), name=f"S{n}")


def alternating_group(n: int) -> FiniteGroup:
    if n < 3:
        return cyclic_group(1, name=f"A{n}")
    gens = [[1, 2, 0] + list(range(3, n))]
    if n > 3:
        if n % 2:
            gens.append(list(range(1, n)) + [0])
        else:
            gens.append([0] + list(range(2, n)) + [1])
    return from_permutations(gens, max_order=math_factorial(n), name=f"A{n}")


def math_factorial(n: int) -> int:
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


def dihedral_group(n: int) -> FiniteGroup:
    """Dihedral group of order 2n (symmetries of the n-gon)."""
    if n < 1:
        raise InputError("dihedral parameter must be >= 1")
    rot = [(i + 1) % n for i in range(n)]
    flip = [(n - i) % n for i in range(n)]
    return from_permutations([rot, flip], max_order=2 * n, name=f"D{n}")


def quaternion_group() -> FiniteGroup:
    """The quaternion group of order 8 on {1,-1,i,-i,j,-j,k,-k}."""
    units = [
        (1, 0, 0, 0), (-1, 0, 0, 0),
        (0, 1, 0, 0), (0, -1, 0, 0),
        (0, 0, 1, 0), (0, 0, -1, 0),
        (0, 0, 0, 1), (0, 0, 0, -1),
    ]
    index = {u: i for i, u in enumerate(units)}

    def qmul(p, q):
        a1, b1, c1, d1 = p
        a2, b2, c2, d2 = q
        return (
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )

    table = [[index[qmul(p, q)] for q in units] for p in units]
    labels = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
    return FiniteGroup(table, labels=labels, name="Q8")


def sl2_f5() -> FiniteGroup:
    """SL(2, F_5) as an explicit table (order 120, perfect)."""
    mats = [
        (a, b, c, d)
        for a in range(5)
        for b in range(5)
        for c in range(5)
        for d in range(5)
        if (a * d - b * c) % 5 == 1
    ]
    ident = (1, 0, 0, 1)
    mats.remove(ident)
    mats = [ident] + sorted(mats)
    index = {m: i for i, m in enumerate(mats)}

    def mmul(p, q):
        a1, b1, c1, d1 = p
        a2, b2, c2, d2 = q
        return (
            (a1 * a2 + b1 * c2) % 5,
            (a1 * b2 + b1 * d2) % 5,
            (c1 * a2 + d1 * c2) % 5,
            (c1 * b2 + d1 * d2) % 5,
        )

    table = [[index[mmul(p, q)] for q in mats] for p in mats]
    return FiniteGroup(table, name="SL(2,5)")


@dataclass(frozen=True)
class Subgroup:
    """A validated subgroup as a sorted element set of its parent group."""

    parent: FiniteGroup
    elements: tuple[int, ...]
    generator: int | None = None

    def __post_init__(self) -> None:
        elems = tuple(sorted(set(int(x) for x in self.elements)))
        object.__setattr__(self, "elements", elems)
        if 0 not in elems:
            raise InvalidSubgroup("subgroup must contain the identity")
        member = set(elems)
        for a in elems:
            if self.parent.inv[a] not in member:
                raise InvalidSubgroup(f"subgroup not closed under inversion at {a}")
            for b in elems:
                if self.parent.table[a][b] not in member:
                    raise InvalidSubgroup(f"subgroup not closed under product at ({a}, {b})")

    @property
    def order(self) -> int:
        return len(self.elements)

    def contains(self, other: Subgroup) -> bool:
        return set(other.elements) <= set(self.elements)

    @staticmethod
    def generated_by(parent: FiniteGroup, gens: Iterable[int]) -> Subgroup:
        gens = list(gens)
        seen = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    for y in (parent.table[x][g], parent.table[x][parent.inv[g]]):
                        if y not in seen:
                            seen.add(y)
                            nxt.append(y)
            frontier = nxt
        return Subgroup(parent, tuple(sorted(seen)))

    @staticmethod
    def whole(parent: FiniteGroup) -> Subgroup:
        return Subgroup(parent, tuple(range(parent.order)))

    @staticmethod
    def trivial(parent: FiniteGroup) -> Subgroup:
        return Subgroup(parent, (0,))

    def as_group(self) -> tuple[FiniteGroup, tuple[int, ...]]:
        """The subgroup as its own FiniteGroup plus the embedding map.

        Cached on the parent keyed by the element set, so equal subgroups
        share one group object and module restrictions stay compatible.
        """
        cache = getattr(self.parent, "_subgroup_cache", None)
        if cache is None:
            cache = {}
            self.parent._subgroup_cache = cache  # type: ignore[attr-defined]
        if self.elements in cache:
            return cache[self.elements]
        embed = self.elements
        pos = {e: i for i, e in enumerate(embed)}
        table = [[pos[self.parent.table[a][b]] for b in embed] for a in embed]
        labels = [self.parent.label(e) for e in embed]
        group = FiniteGroup(table, labels=labels, name=f"{self.parent.name or 'G'}|{embed}")
        cache[self.elements] = (group, embed)
        return group, embed


def cyclic_subgroups(group: FiniteGroup) -> list[Subgroup]:
    """All distinct cyclic subgroups, lexicographic by sorted element set.

    Each subgroup carries a designated generator (the smallest element index
    generating it).
    """
    found: dict[tuple[int, ...], int] = {}
    for g in range(group.order):
        elems = [0]
        x = g
        while x != 0:
            elems.append(x)
            x = group.table[x][g]
        key = tuple(sorted(elems))
        found.setdefault(key, g)
    return [
        Subgroup(group, key, generator=gen)
        for key, gen in sorted(found.items())
    ]


def commutator_subgroup(group: FiniteGroup) -> Subgroup:
    gens = {
        group.commutator(a, b)
        for a in range(group.order)
        for b in range(group.order)
    }
    gens.discard(0)
    return Subgroup.generated_by(group, sorted(gens))


class GroupHom:
    """A validated homomorphism given by its per-element image table."""

    def __init__(self, domain: FiniteGroup, codomain: FiniteGroup, images: Sequence[int]) -> None:
        if len(images) != domain.order:
            raise InvalidHomomorphism("image table length does not match the domain order")
        imgs = tuple(int(x) for x in images)
        for x in imgs:
            if not 0 <= x < codomain.order:
                raise InvalidHomomorphism(f"image index {x} out of range")
        if imgs[0] != 0:
            raise InvalidHomomorphism("homomorphism must send identity to identity")
        for a in range(domain.order):
            for b in range(domain.order):
                if imgs[domain.table[a][b]] != codomain.table[imgs[a]][imgs[b]]:
                    raise InvalidHomomorphism(f"multiplicativity fails at ({a}, {b})")
        self.domain = domain
        self.codomain = codomain
        self.images = imgs

    def __call__(self, a: int) -> int:
        return self.images[a]

    @cached_property
    def is_surjective(self) -> bool:
        return len(set(self.images)) == self.codomain.order

    @cached_property
    def is_injective(self) -> bool:
        return len(set(self.images)) == self.domain.order

    def kernel(self) -> Subgroup:
        return Subgroup(self.domain, tuple(a for a, x in enumerate(self.images) if x == 0))

    def image_subgroup(self) -> Subgroup:
        return Subgroup(self.codomain, tuple(sorted(set(self.images))))


@dataclass(frozen=True)
class Abelianization:
    """G/[G,G] in invariant-factor form with the projection map.

    ``coords[x]`` projects element ``x``; ``generator_preimages[i]`` is an
    element of G mapping to the i-th basis vector of ``target``.
    """

    source: FiniteGroup
    target: FinAb
    coords: tuple[tuple[int, ...], ...]
    generator_preimages: tuple[int, ...]
    commutator: Subgroup

    def project(self, a: int) -> tuple[int, ...]:
        return self.coords[a]


def abelian_table_group(fab: FinAb, name: str | None = None) -> FiniteGroup:
    """A FinAb as an explicit-table group; element index is the mixed-radix rank."""
    elems = list(fab.elements())
    index = {e: i for i, e in enumerate(elems)}
    table = [[index[fab.add(a, b)] for b in elems] for a in elems]
    labels = ["+".join(map(str, e)) if e else "0" for e in elems]
    return FiniteGroup(table, labels=labels, name=name or f"Ab{list(fab.factors)}")


def quotient_group(group: FiniteGroup, normal: Subgroup) -> tuple[FiniteGroup, tuple[int, ...]]:
    """The quotient by a normal subgroup, plus the projection index map.

    Cosets are labeled by their minimal element, sorted ascending, so the
    identity coset is index 0 and the construction is canonical.
    """
    nset = set(normal.elements)
    for g in range(group.order):
        for x in normal.elements:
            if group.conjugate(g, x) not in nset:
                raise InvalidSubgroup(f"subgroup is not normal: {g} conjugates {x} outside")
    rep = [min(group.table[a][x] for x in normal.elements) for a in range(group.order)]
    reps = sorted(set(rep))
    rep_index = {r: i for i, r in enumerate(reps)}
    table = [[rep_index[rep[group.table[a][b]]] for b in reps] for a in reps]
    labels = [group.label(r) for r in reps]
    quot = FiniteGroup(table, labels=labels, name=f"{group.name or 'G'}/N{len(nset)}")
    proj = tuple(rep_index[rep[a]] for a in range(group.order))
    return quot, proj


def abelianization(group: FiniteGroup) -> Abelianization:
    """G/[G,G] with its projection; the two order computations must agree."""
    comm = commutator_subgroup(group)
    quot, proj = quotient_group(group, comm)
    if quot.order * comm.order != group.order:
        raise GerbesError("commutator index does not match the quotient order")
    decomp = abelian_structure(quot.table)
    coords = tuple(decomp.coords[proj[a]] for a in range(group.order))
    pre = []
    for gen_q in decomp.generators:
        pre.append(proj.index(gen_q))
    return Abelianization(group, decomp.group, coords, tuple(pre), comm)
