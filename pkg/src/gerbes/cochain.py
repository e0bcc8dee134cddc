"""Normalized bar-resolution cochains, cohomology, cup products, solvers.

A degree-n cochain stores one carrier vector per n-tuple of non-identity
group elements (value zero whenever an argument is the identity), indexed
lexicographically.  The differential is the inhomogeneous bar formula

    (dc)(g_1,...,g_{n+1}) = g_1.c(g_2,...,g_{n+1})
                            + sum_i (-1)^i c(..., g_i g_{i+1}, ...)
                            + (-1)^{n+1} c(g_1,...,g_n)

evaluated exactly.  Cohomology is computed by integer SNF on the kernel
lattice {x : d_n x == 0 mod carrier factors} against the image lattice of
d_{n-1} plus the carrier relations; canonical representatives come from the
deterministic pivot order, so identical inputs give identical certificates.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DegreeTooHigh,
    GerbesError,
    InputError,
    NotACocycle,
    SizeBound,
)
from .groups import Subgroup
from .linalg import Congruence, kernel_mod, snf, solve_mod
from .modules import GModule, Pairing, restrict_module

MAX_DEGREE = 3
DEFAULT_GROUP_BOUND = 64
_PLAN_SLOT_BOUND = 4_000_000


class Cochain:
    """An immutable normalized cochain of degree 0..3."""

    __slots__ = ("module", "degree", "values", "_array")

    def __init__(self, module: GModule, degree: int, values: Sequence[Sequence[int]]) -> None:
        if not 0 <= degree <= MAX_DEGREE:
            raise DegreeTooHigh(f"cochain degree {degree} outside 0..{MAX_DEGREE}")
        q = module.group.order - 1
        slots = q**degree
        if len(values) != slots:
            raise InputError(f"expected {slots} value slots, got {len(values)}")
        self.module = module
        self.degree = degree
        self.values: tuple[tuple[int, ...], ...] = tuple(
            module.carrier.reduce(v) for v in values
        )
        self._array: np.ndarray | None = None

    @staticmethod
    def zero(module: GModule, degree: int) -> Cochain:
        q = module.group.order - 1
        z = module.carrier.zero()
        return Cochain(module, degree, [z] * (q**degree))

    @staticmethod
    def from_function(module: GModule, degree: int, fn: Callable[[tuple[int, ...]], Sequence[int]]) -> Cochain:
        q = module.group.order - 1
        vals = [fn(t) for t in itertools.product(range(1, q + 1), repeat=degree)]
        return Cochain(module, degree, vals)

    @staticmethod
    def random(module: GModule, degree: int, rng: random.Random) -> Cochain:
        q = module.group.order - 1
        d = module.carrier.factors
        vals = [
            tuple(rng.randrange(di) for di in d) for _ in range(q**degree)
        ]
        return Cochain(module, degree, vals)

    def slot_index(self, elements: Sequence[int]) -> int:
        q = self.module.group.order - 1
        idx = 0
        for g in elements:
            idx = idx * q + (g - 1)
        return idx

    def value(self, *elements: int) -> tuple[int, ...]:
        if len(elements) != self.degree:
            raise InputError(f"expected {self.degree} arguments")
        if any(g == 0 for g in elements):
            return self.module.carrier.zero()
        return self.values[self.slot_index(elements)]

    def as_array(self) -> np.ndarray:
        if self._array is None:
            k = self.module.rank
            arr = np.asarray(self.values, dtype=np.int64).reshape(len(self.values), k)
            self._array = arr
        return self._array

    def flat(self) -> list[int]:
        return [x for v in self.values for x in v]

    def _binary(self, other: Cochain, op: Callable[[Sequence[int], Sequence[int]], tuple[int, ...]]) -> Cochain:
        if other.module is not self.module or other.degree != self.degree:
            raise InputError("cochain mismatch in arithmetic")
        return Cochain(self.module, self.degree, [op(a, b) for a, b in zip(self.values, other.values)])

    def __add__(self, other: Cochain) -> Cochain:
        return self._binary(other, self.module.carrier.add)

    def __sub__(self, other: Cochain) -> Cochain:
        return self._binary(other, self.module.carrier.sub)

    def __neg__(self) -> Cochain:
        car = self.module.carrier
        return Cochain(self.module, self.degree, [car.neg(v) for v in self.values])

    def scaled(self, n: int) -> Cochain:
        car = self.module.carrier
        return Cochain(self.module, self.degree, [car.scale(n, v) for v in self.values])

    def is_zero(self) -> bool:
        z = self.module.carrier.zero()
        return all(v == z for v in self.values)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Cochain)
            and other.module is self.module
            and other.degree == self.degree
            and other.values == self.values
        )

    def __hash__(self) -> int:
        return hash((id(self.module), self.degree, self.values))

    def __repr__(self) -> str:
        return f"Cochain(deg={self.degree}, {self.module!r})"


@dataclass(frozen=True)
class _DiffPlan:
    """Precomputed index arrays for one differential degree."""

    degree: int
    out_slots: int
    in_slots: int
    middle: tuple[tuple[int, np.ndarray], ...]  # (sign, input index per output slot)
    last_sign: int
    last_idx: np.ndarray


def _digits(count: int, positions: int, q: int) -> np.ndarray:
    """Digit array (count x positions) of tuple ranks, digits in 1..q."""
    idx = np.arange(count, dtype=np.int64)
    out = np.empty((count, positions), dtype=np.int64)
    for p in range(positions - 1, -1, -1):
        out[:, p] = idx % q + 1
        idx //= q
    return out


def _rank_of_digits(dig: np.ndarray, q: int) -> np.ndarray:
    out = np.zeros(dig.shape[0], dtype=np.int64)
    for p in range(dig.shape[1]):
        out = out * q + (dig[:, p] - 1)
    return out


def _diff_plan(module: GModule, degree: int) -> _DiffPlan:
    cache = getattr(module, "_diff_plans", None)
    if cache is None:
        cache = {}
        module._diff_plans = cache  # type: ignore[attr-defined]
    if degree in cache:
        return cache[degree]
    q = module.group.order - 1
    n = degree
    out_slots = q ** (n + 1)
    if out_slots > _PLAN_SLOT_BOUND:
        raise SizeBound(f"differential target has {out_slots} slots; raise the bound or shrink the group")
    in_slots = q**n
    mt = np.asarray(module.group.table, dtype=np.int64)
    dig = _digits(out_slots, n + 1, q)
    middle = []
    sentinel = in_slots  # extra zero row in the padded value array
    for i in range(1, n + 1):
        merged = mt[dig[:, i - 1], dig[:, i]]
        cols = [dig[:, j] for j in range(i - 1)] + [merged] + [dig[:, j] for j in range(i + 1, n + 1)]
        stack = np.stack(cols, axis=1) if cols else np.zeros((out_slots, 0), dtype=np.int64)
        killed = merged == 0
        safe = stack.copy()
        safe[killed] = 1
        idx = _rank_of_digits(safe, q)
        idx[killed] = sentinel
        middle.append(((-1) ** i, idx))
    last_idx = (
        _rank_of_digits(dig[:, :n], q) if n else np.zeros(out_slots, dtype=np.int64)
    )
    plan = _DiffPlan(n, out_slots, in_slots, tuple(middle), (-1) ** (n + 1), last_idx)
    cache[degree] = plan
    return plan


def _differential_array(c: Cochain) -> np.ndarray:
    """Raw value table of dc (degree + 1), before wrapping in a Cochain."""
    module = c.module
    n = c.degree
    q = module.group.order - 1
    k = module.rank
    plan = _diff_plan(module, n)
    if q == 0 or k == 0:
        return np.zeros((plan.out_slots, k), dtype=np.int64)
    vals = c.as_array()
    padded = np.vstack([vals, np.zeros((1, k), dtype=np.int64)])
    out = np.zeros((plan.out_slots, k), dtype=np.int64)
    block = plan.in_slots
    for g in range(1, q + 1):
        p = np.asarray(module.matrix(g), dtype=np.int64)
        out[(g - 1) * block : g * block] += vals @ p.T
    for sign, idx in plan.middle:
        out += sign * padded[idx]
    out += plan.last_sign * padded[plan.last_idx]
    factors = np.asarray(module.carrier.factors, dtype=np.int64)
    return np.mod(out, factors)


def differential(c: Cochain, *, _internal: bool = False) -> Cochain:
    """The bar differential; public use is capped at input degree 2."""
    if c.degree > 2 and not _internal:
        raise DegreeTooHigh("public differentials stop at degree-2 inputs")
    if c.degree >= MAX_DEGREE:
        raise DegreeTooHigh("differential of a degree-3 cochain leaves the supported range")
    out = _differential_array(c)
    return Cochain(c.module, c.degree + 1, [tuple(int(x) for x in row) for row in out])


def is_cocycle(c: Cochain) -> bool:
    """d c == 0, usable through degree 3 (degree-3 check stays internal)."""
    if c.degree < MAX_DEGREE:
        return differential(c, _internal=True).is_zero()
    return not _differential_array(c).any()


def restriction(z: Cochain, sub: Subgroup) -> Cochain:
    """Pull a cochain back to a subgroup (values on tuples from the subgroup)."""
    module = restrict_module(z.module, sub)
    group, embed = sub.as_group()
    q = group.order - 1
    vals = [
        z.value(*(embed[g] for g in t))
        for t in itertools.product(range(1, q + 1), repeat=z.degree)
    ]
    return Cochain(module, z.degree, vals)


def cup(a: Cochain, b: Cochain, pairing: Pairing) -> Cochain:
    """Cup product (a u b)(g_1..g_{p+q}) = pair(a(g_1..g_p), (g_1..g_p).b(rest))."""
    p, q_deg = a.degree, b.degree
    if p + q_deg > MAX_DEGREE:
        raise DegreeTooHigh(f"cup degree {p + q_deg} exceeds {MAX_DEGREE}")
    if not pairing.left.compatible_with(a.module) or not pairing.right.compatible_with(b.module):
        raise InputError("cup arguments do not match the pairing's modules")
    group = pairing.left.group
    target = pairing.target
    qn = group.order - 1
    vals = []
    for t in itertools.product(range(1, qn + 1), repeat=p + q_deg):
        head, tail = t[:p], t[p:]
        prefix = 0
        for g in head:
            prefix = group.table[prefix][g]
        bval = pairing.right.apply(prefix, b.value(*tail))
        vals.append(pairing.apply(a.value(*head), bval))
    return Cochain(target, p + q_deg, vals)


@dataclass(frozen=True)
class ObstructionCertificate:
    """Evidence that a cocycle is not a coboundary.

    For degrees 1 and 2 this is the nonzero class in canonical coordinates;
    for degree 3 it is the list of unsatisfiable reduced congruences.
    """

    degree: int
    class_coords: tuple[int, ...] | None
    congruences: tuple[Congruence, ...]


@dataclass(frozen=True)
class CoboundaryResult:
    primitive: Cochain | None
    certificate: ObstructionCertificate | None


def _differential_matrix(module: GModule, degree: int) -> np.ndarray:
    """Integer matrix of d_degree on flattened coordinates (int64)."""
    q = module.group.order - 1
    k = module.rank
    in_dim = (q**degree) * k
    out_dim = (q ** (degree + 1)) * k
    mat = np.zeros((out_dim, in_dim), dtype=np.int64)
    if in_dim == 0 or out_dim == 0:
        return mat
    plan = _diff_plan(module, degree)
    block = plan.in_slots
    for g in range(1, q + 1):
        p = np.asarray(module.matrix(g), dtype=np.int64)
        for s in range(block):
            r0 = ((g - 1) * block + s) * k
            c0 = s * k
            mat[r0 : r0 + k, c0 : c0 + k] += p
    for sign, idx in plan.middle:
        for out_slot, in_slot in enumerate(idx):
            if in_slot == plan.in_slots:
                continue
            r0 = out_slot * k
            c0 = int(in_slot) * k
            mat[r0 : r0 + k, c0 : c0 + k] += sign * np.eye(k, dtype=np.int64)
    for out_slot, in_slot in enumerate(plan.last_idx):
        r0 = out_slot * k
        c0 = int(in_slot) * k
        mat[r0 : r0 + k, c0 : c0 + k] += plan.last_sign * np.eye(k, dtype=np.int64)
    return mat


class CohomologyGroup:
    """H^n(G, M) with canonical representatives and a reduction map."""

    def __init__(self, module: GModule, degree: int, max_order: int = DEFAULT_GROUP_BOUND) -> None:
        if degree not in (0, 1, 2):
            raise DegreeTooHigh("cohomology is computed for degrees 0, 1, 2 only")
        if module.group.order > max_order:
            raise SizeBound(
                f"group order {module.group.order} exceeds the cohomology bound {max_order}"
            )
        self.module = module
        self.degree = degree
        group = module.group
        q = group.order - 1
        k = module.rank
        self._in_dim = (q**degree) * k
        e = module.carrier.exponent
        self._e = max(e, 2)
        car = module.carrier
        if k == 0:
            self.factors: tuple[int, ...] = ()
            self.representatives: tuple[Cochain, ...] = ()
            self._kernel = None
            return

        a_mat = _differential_matrix(module, degree)
        out_factors = np.tile(np.asarray(car.factors, dtype=np.int64), q ** (degree + 1))
        scale = (self._e // out_factors)[:, None] if a_mat.shape[0] else np.zeros((0, 1), dtype=np.int64)
        self._a_scaled = (a_mat * scale) % self._e if a_mat.shape[0] else a_mat
        self._kernel = kernel_mod(self._a_scaled, self._e)

        rel = np.tile(np.asarray(car.factors, dtype=np.int64), q**degree)
        self._rel = [int(x) for x in rel]
        columns: list[list[int]] = []
        if degree >= 1:
            b_mat = _differential_matrix(module, degree - 1)
            for j in range(b_mat.shape[1]):
                columns.append([int(x) for x in b_mat[:, j]])
        for i, r in enumerate(self._rel):
            col = [0] * self._in_dim
            col[i] = r
            columns.append(col)
        coord_cols = [self._kernel.coordinates(col) for col in columns]
        c_matrix = [[coord_cols[j][i] for j in range(len(coord_cols))] for i in range(self._in_dim)]
        res = snf(c_matrix)
        self._u = res.U
        self._u_inv = res.U_inv
        diag = [res.diagonal_at(i) for i in range(self._in_dim)]
        if any(d == 0 for d in diag):
            raise GerbesError("cohomology quotient has a free part; relations are missing")
        self._positions = tuple(i for i, d in enumerate(diag) if d >= 2)
        self.factors = tuple(diag[i] for i in self._positions)
        reps = []
        for p in self._positions:
            x = [self._u_inv[r][p] for r in range(self._in_dim)]
            vec = self._kernel.from_coordinates(x)
            reps.append(self._vector_to_cochain(vec))
        self.representatives = tuple(reps)
        for i, rep in enumerate(self.representatives):
            want = tuple(1 if j == i else 0 for j in range(len(self.factors)))
            if self.reduce(rep) != want:
                raise GerbesError("canonical representative does not reduce to a basis vector")

    @property
    def order(self) -> int:
        n = 1
        for d in self.factors:
            n *= d
        return n

    def _vector_to_cochain(self, vec: Sequence[int]) -> Cochain:
        k = self.module.rank
        vals = [tuple(vec[s * k : (s + 1) * k]) for s in range(len(vec) // k)]
        return Cochain(self.module, self.degree, vals)

    def zero_cochain(self) -> Cochain:
        return Cochain.zero(self.module, self.degree)

    def is_cocycle(self, z: Cochain) -> bool:
        if z.degree != self.degree or not self.module.compatible_with(z.module):
            raise InputError("cochain does not live in this cohomology group")
        if self.module.rank == 0:
            return True
        vec = np.asarray(z.flat(), dtype=np.int64)
        if self._a_scaled.shape[0] == 0:
            return True
        return not (self._a_scaled @ vec % self._e).any()

    def reduce(self, z: Cochain) -> tuple[int, ...]:
        """Coordinates of the class of ``z`` in the invariant-factor basis."""
        if not self.is_cocycle(z):
            raise NotACocycle(f"cochain is not a {self.degree}-cocycle")
        if self.module.rank == 0:
            return ()
        y = self._kernel.coordinates([int(v) for v in z.flat()])
        out = []
        for p, d in zip(self._positions, self.factors):
            out.append(sum(self._u[p][j] * y[j] for j in range(len(y))) % d)
        return tuple(out)

    def cochain_from_coords(self, coords: Sequence[int]) -> Cochain:
        z = self.zero_cochain()
        for c, rep in zip(coords, self.representatives):
            if c:
                z = z + rep.scaled(int(c))
        return z

    def __repr__(self) -> str:
        return f"H^{self.degree}({self.module!r}) = {list(self.factors)}"


def cohomology(module: GModule, degree: int, max_order: int = DEFAULT_GROUP_BOUND) -> CohomologyGroup:
    """H^degree(G, M) for degree <= 2, cached on the module."""
    cache = getattr(module, "_cohomology_cache", None)
    if cache is None:
        cache = {}
        module._cohomology_cache = cache  # type: ignore[attr-defined]
    if degree not in cache:
        cache[degree] = CohomologyGroup(module, degree, max_order=max_order)
    return cache[degree]


def solve_coboundary(y: Cochain, max_order: int = DEFAULT_GROUP_BOUND) -> CoboundaryResult:
    """Find c with dc = y, or certify that no primitive exists.

    ``y`` must be a cocycle of degree 1..3.  The solution is the
    deterministic minimal one produced by Howell back-substitution; on
    failure the certificate carries the nonzero reduced class (degrees 1
    and 2) or the unsatisfiable congruences (degree 3).
    """
    n = y.degree
    if not 1 <= n <= MAX_DEGREE:
        raise DegreeTooHigh("solve_coboundary needs degree between 1 and 3")
    if not is_cocycle(y):
        raise NotACocycle(f"target of solve_coboundary is not a {n}-cocycle")
    module = y.module
    car = module.carrier
    k = module.rank
    q = module.group.order - 1
    if k == 0 or q == 0:
        return CoboundaryResult(Cochain.zero(module, n - 1), None)
    e = max(car.exponent, 2)
    b_mat = _differential_matrix(module, n - 1)
    out_factors = np.tile(np.asarray(car.factors, dtype=np.int64), q**n)
    scale = e // out_factors
    b_scaled = (b_mat * scale[:, None]) % e
    target = [int(v) * int(s) % e for v, s in zip(y.flat(), scale)]
    x, failed = solve_mod(b_scaled, target, e)
    if x is None:
        coords: tuple[int, ...] | None = None
        if n <= 2:
            coords = cohomology(module, n, max_order=max_order).reduce(y)
        return CoboundaryResult(None, ObstructionCertificate(n, coords, tuple(failed)))
    vals = [tuple(x[s * k : (s + 1) * k]) for s in range(q ** (n - 1))]
    c = Cochain(module, n - 1, vals)
    if differential(c, _internal=True) != y:
        raise GerbesError("coboundary solver produced an invalid primitive")
    return CoboundaryResult(c, None)


def random_cocycle(coh: CohomologyGroup, rng: random.Random) -> Cochain:
    """A random cocycle: random class plus a random coboundary."""
    z = coh.zero_cochain()
    for d, rep in zip(coh.factors, coh.representatives):
        z = z + rep.scaled(rng.randrange(d))
    if coh.degree >= 1:
        c = Cochain.random(coh.module, coh.degree - 1, rng)
        z = z + differential(c)
    return z
