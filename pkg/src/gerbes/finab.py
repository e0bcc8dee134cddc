"""Finite abelian groups in invariant-factor form and exact Q/Z arithmetic."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd
from typing import Iterator, Sequence

from .errors import GerbesError, InputError


@dataclass(frozen=True)
class FinAb:
    """Z/d_1 + ... + Z/d_k with d_1 | d_2 | ... | d_k and every d_i >= 2.

    The empty factor list is the trivial group.  Elements are integer
    tuples reduced componentwise.
    """

    factors: tuple[int, ...]

    def __post_init__(self) -> None:
        for i, d in enumerate(self.factors):
            if d < 2:
                raise InputError(f"invariant factor {d} < 2 at position {i}")
            if i and self.factors[i] % self.factors[i - 1]:
                raise InputError(
                    f"invariant factors {self.factors[i - 1]}, {self.factors[i]} break the divisibility chain"
                )

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def order(self) -> int:
        n = 1
        for d in self.factors:
            n *= d
        return n

    @property
    def exponent(self) -> int:
        return self.factors[-1] if self.factors else 1

    def reduce(self, vec: Sequence[int]) -> tuple[int, ...]:
        if len(vec) != self.rank:
            raise InputError(f"vector length {len(vec)} != rank {self.rank}")
        return tuple(int(v) % d for v, d in zip(vec, self.factors))

    def zero(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def add(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        return tuple((x + y) % d for x, y, d in zip(a, b, self.factors))

    def neg(self, a: Sequence[int]) -> tuple[int, ...]:
        return tuple((-x) % d for x, d in zip(a, self.factors))

    def sub(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        return tuple((x - y) % d for x, y, d in zip(a, b, self.factors))

    def scale(self, n: int, a: Sequence[int]) -> tuple[int, ...]:
        return tuple((n * x) % d for x, d in zip(a, self.factors))

    def element_order(self, a: Sequence[int]) -> int:
        n = 1
        for x, d in zip(a, self.factors):
            n = n * (d // gcd(x, d)) // gcd(n, d // gcd(x, d))
        return n

    def elements(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(range(d) for d in self.factors))

    def basis_vector(self, i: int) -> tuple[int, ...]:
        return tuple(1 if j == i else 0 for j in range(self.rank))


@dataclass(frozen=True, order=True)
class QmodZ:
    """An element a/b of Q/Z in lowest terms with 0 <= a < b."""

    num: int
    den: int

    def __post_init__(self) -> None:
        if self.den <= 0:
            raise InputError("denominator must be positive")
        if not (0 <= self.num < self.den) or gcd(self.num, self.den) != 1:
            raise InputError(f"{self.num}/{self.den} is not in canonical reduced form")

    @staticmethod
    def make(num: int, den: int) -> QmodZ:
        if den == 0:
            raise InputError("denominator must be nonzero")
        if den < 0:
            num, den = -num, -den
        num %= den
        g = gcd(num, den)
        return QmodZ(num // g, den // g)

    @staticmethod
    def zero() -> QmodZ:
        return QmodZ(0, 1)

    @staticmethod
    def parse(text: str) -> QmodZ:
        s = text.strip()
        if "/" in s:
            a, b = s.split("/", 1)
            return QmodZ.make(int(a), int(b))
        return QmodZ.make(int(s), 1)

    def __add__(self, other: QmodZ) -> QmodZ:
        return QmodZ.make(self.num * other.den + other.num * self.den, self.den * other.den)

    def __neg__(self) -> QmodZ:
        return QmodZ.make(-self.num, self.den)

    def __sub__(self, other: QmodZ) -> QmodZ:
        return self + (-other)

    def scaled(self, n: int) -> QmodZ:
        return QmodZ.make(n * self.num, self.den)

    @property
    def order(self) -> int:
        return self.den

    def is_zero(self) -> bool:
        return self.num == 0

    def __str__(self) -> str:
        return f"{self.num}/{self.den}"


@dataclass(frozen=True)
class AbelianTable:
    """Invariant-factor coordinates for an abelian multiplication table.

    ``coords[x]`` are the coordinates of element ``x`` in ``group`` and
    ``generators[i]`` is an element mapping to the i-th basis vector.
    """

    group: FinAb
    coords: tuple[tuple[int, ...], ...]
    generators: tuple[int, ...]


def _element_orders(table: Sequence[Sequence[int]]) -> list[int]:
    orders = []
    for x in range(len(table)):
        n, y = 1, x
        while y != 0:
            y = table[y][x]
            n += 1
        orders.append(n)
    return orders


def abelian_structure(table: Sequence[Sequence[int]]) -> AbelianTable:
    """Decompose an abelian group given by its multiplication table.

    Splits off a cyclic subgroup of maximal order, recurses on the quotient,
    and lifts the quotient generators to true complements, so the returned
    coordinate map is a genuine isomorphism onto the invariant-factor form.
    The result is verified to be a bijective homomorphism before returning.
    """
    q = len(table)
    if q == 1:
        return AbelianTable(FinAb(()), ((),), ())

    orders = _element_orders(table)
    m1 = max(orders)
    g1 = orders.index(m1)

    # neg[x] via order loop; powers of g1 and discrete log within <g1>.
    powers = [0]
    for _ in range(m1 - 1):
        powers.append(table[powers[-1]][g1])
    dlog = {p: i for i, p in enumerate(powers)}
    neg = [0] * q
    for x in range(q):
        y, prev = x, 0
        while y != 0:
            prev, y = y, table[y][x]
        neg[x] = prev if x else 0

    # Quotient by <g1>: represent each coset by its minimal element.
    rep = [min(table[x][p] for p in powers) for x in range(q)]
    reps = sorted(set(rep))
    rep_index = {r: i for i, r in enumerate(reps)}
    qtable = [[rep_index[rep[table[a][b]]] for b in reps] for a in reps]
    sub = abelian_structure(qtable)

    # Lift quotient generators to elements of exact order (true complement).
    lifted: list[int] = []
    for gen_q, m_i in zip(sub.generators, sub.group.factors):
        g = reps[gen_q]
        acc = 0
        for _ in range(m_i):
            acc = table[acc][g]
        d = dlog[acc]
        if d % m_i:
            raise GerbesError("abelian splitting failed; table is not a group")
        s = (-(d // m_i)) % m1
        adj = g
        for _ in range(s):
            adj = table[adj][g1]
        lifted.append(adj)

    factors = sub.group.factors + (m1,)
    group = FinAb(factors)
    coords: list[tuple[int, ...]] = []
    for x in range(q):
        partial = sub.coords[rep_index[rep[x]]]
        r = x
        for a_i, gen in zip(partial, lifted):
            step = neg[gen]
            for _ in range(a_i):
                r = table[r][step]
        if r not in dlog:
            raise GerbesError("abelian splitting failed; residue outside the cyclic part")
        coords.append(partial + (dlog[r],))

    result = AbelianTable(group, tuple(coords), tuple(lifted) + (g1,))
    _verify_abelian_structure(table, result)
    return result


def _verify_abelian_structure(table: Sequence[Sequence[int]], res: AbelianTable) -> None:
    q = len(table)
    if len(set(res.coords)) != q or res.group.order != q:
        raise GerbesError("abelian structure map is not bijective")
    for x in range(q):
        for y in range(q):
            if res.coords[table[x][y]] != res.group.add(res.coords[x], res.coords[y]):
                raise GerbesError("abelian structure map is not a homomorphism")
    for i, gen in enumerate(res.generators):
        if res.coords[gen] != res.group.basis_vector(i):
            raise GerbesError("abelian structure generators do not match basis vectors")
