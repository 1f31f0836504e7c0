"""
Finite loops given by Cayley tables.

Elements are dense indices 0..n-1 and the identity is pinned at 0. Every table is a
read-only numpy int32 array; divisions come from argsort of the table, so a\\b and
b/a are plain lookups once computed.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterator, List, Literal, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from config_loader import get_settings
from errors import (
    BudgetExceeded,
    LoopError,
    LoopValidationError,
    NotCommutativeError,
    NotNormalError,
    OrderCapExceeded,
)
from schemas import StructureProfile
from services.parallel import first_witness, scan_ranges

logger = logging.getLogger(__name__)

# Largest number of table cells a single vectorized comparison may touch.
BATCH_CELLS = 1 << 22


class CayleyLoop:
    """A finite loop as its multiplication table, table[i, j] = i*j.

    Build instances through build_loop(); the constructor trusts its input.
    """

    def __init__(self, table: np.ndarray):
        arr = np.array(table, dtype=np.int32)
        arr.setflags(write=False)
        self.table = arr

    @property
    def order(self) -> int:
        return int(self.table.shape[0])

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    @cached_property
    def ldiv(self) -> np.ndarray:
        """ldiv[a, b] = a\\b."""
        arr = np.argsort(self.table, axis=1).astype(np.int32)
        arr.setflags(write=False)
        return arr

    @cached_property
    def rdiv(self) -> np.ndarray:
        """rdiv[b, a] = b/a."""
        arr = np.argsort(self.table, axis=0).astype(np.int32)
        arr.setflags(write=False)
        return arr

    @cached_property
    def is_commutative(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    @cached_property
    def is_associative(self) -> bool:
        T = self.table
        for x in range(self.order):
            # (xy)z against x(yz), rows y, columns z
            if not np.array_equal(T[T[x]], T[x][T]):
                return False
        return True

    def __eq__(self, other) -> bool:
        return isinstance(other, CayleyLoop) and np.array_equal(self.table, other.table)

    def __hash__(self) -> int:
        return hash(self.table.tobytes())

    def __repr__(self) -> str:
        return f"CayleyLoop(order={self.order})"


class InnerMapping(NamedTuple):
    """One inner generator L_{x,y}, R_{x,y} or T_x as a permutation of 0..n-1."""
    kind: Literal["L", "R", "T"]
    x: int
    y: Optional[int]
    images: np.ndarray

    @property
    def label(self) -> str:
        if self.kind == "T":
            return f"T[{self.x}]"
        return f"{self.kind}[{self.x},{self.y}]"

    @property
    def is_identity(self) -> bool:
        return bool(np.array_equal(self.images, np.arange(len(self.images))))


class AutomorphicVerdict(NamedTuple):
    holds: bool
    witness: Optional[Tuple]
    method: str
    checked: int


@dataclass(frozen=True)
class Subloop:
    parent: CayleyLoop
    members: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, x: int) -> bool:
        return x in self.members

    def __iter__(self):
        return iter(self.members)

    @property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.parent.order, dtype=bool)
        m[list(self.members)] = True
        return m


@dataclass(frozen=True)
class InvariantSubsets:
    center: Subloop
    left_nucleus: Subloop
    middle_nucleus: Subloop
    right_nucleus: Subloop
    nucleus: Subloop
    associator_subloop: Subloop


class QuotientResult(NamedTuple):
    loop: CayleyLoop
    coset_map: np.ndarray


class IsoResult(NamedTuple):
    isomorphic: bool
    mapping: Optional[np.ndarray]
    nodes: int
    reason: str


# --- Construction ---

def build_loop(table, order_cap: Optional[int] = None) -> CayleyLoop:
    """
    Validate a multiplication table and wrap it as a CayleyLoop.

    Raises LoopValidationError for shape problems, a repeated entry in some row or
    column ("not a Latin square") or a missing identity at index 0.
    """
    arr = np.asarray(table)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise LoopValidationError(f"table must be a non-empty square array, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        raise LoopValidationError(f"table entries must be integers, got {arr.dtype}")

    n = arr.shape[0]
    cap = order_cap or get_settings().order_cap
    if n > cap:
        raise OrderCapExceeded(f"order cap exceeded: {n} > {cap}")
    if arr.min() < 0 or arr.max() >= n:
        raise LoopValidationError(f"table entries must lie in 0..{n - 1}")

    expected = np.arange(n)
    bad_rows = np.nonzero((np.sort(arr, axis=1) != expected).any(axis=1))[0]
    if bad_rows.size:
        row = int(bad_rows[0])
        raise LoopValidationError(f"not a Latin square: row {row} repeats an element", witness=("row", row))
    bad_cols = np.nonzero((np.sort(arr, axis=0) != expected[:, None]).any(axis=0))[0]
    if bad_cols.size:
        col = int(bad_cols[0])
        raise LoopValidationError(f"not a Latin square: column {col} repeats an element", witness=("column", col))

    if not (np.array_equal(arr[0], expected) and np.array_equal(arr[:, 0], expected)):
        raise LoopValidationError("index 0 is not an identity")

    return CayleyLoop(arr)


def divide(Q: CayleyLoop, a: int, b: int, side: Literal["left", "right"] = "left") -> int:
    """Left side gives a\\b (a*(a\\b) = b); right side gives b/a ((b/a)*a = b)."""
    if side == "left":
        return int(Q.ldiv[a, b])
    if side == "right":
        return int(Q.rdiv[b, a])
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def is_commutative(Q: CayleyLoop) -> bool:
    return Q.is_commutative


def is_group(Q: CayleyLoop) -> bool:
    return Q.is_associative


# --- Inner mappings ---

def _left_inner_rows(Q: CayleyLoop, y: int) -> np.ndarray:
    """Row x holds the images of L_{x,y} = L_{yx}^-1 L_y L_x."""
    T = Q.table
    return Q.ldiv[T[y][:, None], T[y][T]]


def _right_inner_rows(Q: CayleyLoop, y: int) -> np.ndarray:
    """Row x holds the images of R_{x,y} = R_{xy}^-1 R_y R_x."""
    T = Q.table
    # [x, z] = ((zx)y) / (xy)
    return Q.rdiv[T[:, y][T.T], T[:, y][:, None]]


def _middle_inner_rows(Q: CayleyLoop) -> np.ndarray:
    """Row x holds the images of T_x = L_x^-1 R_x."""
    return Q.ldiv[np.arange(Q.order)[:, None], Q.table.T]


def _inner_batches(Q: CayleyLoop, commutative_only: bool) -> Iterator[Tuple[str, Optional[int], np.ndarray]]:
    n = Q.order
    for y in range(n):
        yield "L", y, _left_inner_rows(Q, y)
    if commutative_only:
        return
    for y in range(n):
        yield "R", y, _right_inner_rows(Q, y)
    yield "T", None, _middle_inner_rows(Q)


def inner_generators(Q: CayleyLoop, commutative_only: bool = False) -> Iterator[InnerMapping]:
    """
    Yield every L_{x,y}, then every R_{x,y}, then every T_x.

    A commutative loop is automorphic iff all L_{x,y} are automorphisms, so
    commutative_only=True stops after the L family.
    """
    for kind, y, rows in _inner_batches(Q, commutative_only):
        for x in range(Q.order):
            yield InnerMapping(kind, x, y, rows[x])


def _first_non_homomorphism(T: np.ndarray, perms: np.ndarray) -> Optional[Tuple[int, int, int]]:
    """First (row, a, b) with perms[row](ab) != perms[row](a) perms[row](b)."""
    n = T.shape[0]
    step = max(1, BATCH_CELLS // (n * n))
    for start in range(0, perms.shape[0], step):
        P = perms[start:start + step]
        lhs = P[:, T]
        rhs = T[P[:, :, None], P[:, None, :]]
        bad = np.argwhere(lhs != rhs)
        if bad.size:
            row, a, b = bad[0]
            return start + int(row), int(a), int(b)
    return None


def _scan_inner_family(table: np.ndarray, kind: str, start: int, stop: int) -> Optional[Tuple]:
    """Check the L or R family for y in start..stop-1; returns (kind, x, y, a, b) or None."""
    Q = CayleyLoop(table)
    rows_for = _left_inner_rows if kind == "L" else _right_inner_rows
    for y in range(start, stop):
        hit = _first_non_homomorphism(Q.table, rows_for(Q, y))
        if hit is not None:
            x, a, b = hit
            return kind, x, y, a, b
    return None


def _check_inner(Q: CayleyLoop, commutative_only: bool, workers: int) -> AutomorphicVerdict:
    n = Q.order
    kinds = ["L"] if commutative_only else ["L", "R"]
    checked = 0
    for kind in kinds:
        results = scan_ranges(_scan_inner_family, n, (Q.table, kind), workers=workers)
        witness = first_witness(results)
        if witness is not None:
            return AutomorphicVerdict(False, witness, "inner", checked)
        checked += n * n
    if not commutative_only:
        hit = _first_non_homomorphism(Q.table, _middle_inner_rows(Q))
        if hit is not None:
            x, a, b = hit
            return AutomorphicVerdict(False, ("T", x, None, a, b), "inner", checked)
        checked += n
    return AutomorphicVerdict(True, None, "inner", checked)


def _sample_identity_a(Q: CayleyLoop, samples: int, seed: int) -> AutomorphicVerdict:
    """Identity (A) on seeded random quadruples (y, x, a, b)."""
    T, ldiv = Q.table, Q.ldiv
    n = Q.order
    rng = np.random.default_rng(seed)
    batch = 1 << 20
    done = 0
    while done < samples:
        k = min(batch, samples - done)
        y, x, a, b = rng.integers(0, n, size=(4, k))
        yx = T[y, x]

        def phi(z):
            return ldiv[yx, T[y, T[x, z]]]

        bad = np.nonzero(phi(T[a, b]) != T[phi(a), phi(b)])[0]
        if bad.size:
            i = int(bad[0])
            return AutomorphicVerdict(False, (int(y[i]), int(x[i]), int(a[i]), int(b[i])), "identityA", done + i + 1)
        done += k
    return AutomorphicVerdict(True, None, "identityA", done)


def class_two_linearity(Q: CayleyLoop) -> AutomorphicVerdict:
    """
    Check (ab, c, d) = (a, c, d)(b, c, d) for all a, b, c, d.

    Among commutative loops whose associators are central this is equivalent to
    being automorphic.
    """
    if not Q.is_commutative:
        raise NotCommutativeError("not commutative: linearity criterion needs a commutative loop")
    if not np.isin(associator_values(Q), center(Q).members).all():
        raise LoopError("associator subloop is not central")

    T, ldiv = Q.table, Q.ldiv
    n = Q.order
    step = max(1, BATCH_CELLS // (n * n))
    for c in range(n):
        # A[a, d] = (a, c, d)
        A = ldiv[T[:, T[c]], T[T[:, c]]]
        for d0 in range(0, n, step):
            alpha = A[:, d0:d0 + step]
            lhs = alpha[T]
            rhs = T[alpha[:, None, :], alpha[None, :, :]]
            bad = np.argwhere(lhs != rhs)
            if bad.size:
                a, b, d = (int(v) for v in bad[0])
                return AutomorphicVerdict(False, (a, b, c, d0 + d), "linearity", c * n * n * n)
    return AutomorphicVerdict(True, None, "linearity", n ** 4)


def is_automorphic(
    Q: CayleyLoop,
    method: Literal["inner", "identityA", "linearity"] = "inner",
    sample: Optional[int] = None,
    seed: Optional[int] = None,
    exhaustive: Optional[bool] = None,
    workers: Optional[int] = None,
) -> AutomorphicVerdict:
    """
    Decide whether Q is automorphic.

    inner: every inner generator is an automorphism (only L_{x,y} for commutative
    loops). identityA: identity (A) over all quadruples when the order is at most
    the exhaustive limit (or exhaustive=True), otherwise over a seeded sample.
    Failures carry a witness tuple.
    """
    settings = get_settings()
    workers = workers or settings.workers

    if method == "inner":
        return _check_inner(Q, commutative_only=Q.is_commutative, workers=workers)

    if method == "linearity":
        return class_two_linearity(Q)

    if method != "identityA":
        raise ValueError(f"unknown method {method!r}")
    if not Q.is_commutative:
        raise NotCommutativeError("not commutative: identity (A) needs a commutative loop")

    if exhaustive is None:
        exhaustive = Q.order <= settings.exhaustive_limit
    if exhaustive:
        logger.info(f"Checking identity (A) exhaustively on order {Q.order}")
        results = scan_ranges(_scan_inner_family, Q.order, (Q.table, "L"), workers=workers)
        witness = first_witness(results)
        if witness is not None:
            _, x, y, a, b = witness
            return AutomorphicVerdict(False, (y, x, a, b), "identityA", Q.order ** 4)
        return AutomorphicVerdict(True, None, "identityA", Q.order ** 4)

    samples = sample or settings.identity_a_samples
    logger.info(f"Sampling identity (A) on order {Q.order}: {samples} quadruples")
    return _sample_identity_a(Q, samples, settings.seed if seed is None else seed)


# --- Associators ---

def associator(Q: CayleyLoop, x: int, y: int, z: int) -> int:
    """(x(yz)) \\ ((xy)z)."""
    T = Q.table
    return int(Q.ldiv[T[x, T[y, z]], T[T[x, y], z]])


def associator_slice(Q: CayleyLoop, x: int) -> np.ndarray:
    """All associators (x, y, z), indexed [y, z]."""
    T = Q.table
    return Q.ldiv[T[x][T], T[T[x]]]


def associator_values(Q: CayleyLoop) -> np.ndarray:
    seen = np.zeros(Q.order, dtype=bool)
    for x in range(Q.order):
        seen[associator_slice(Q, x)] = True
    return np.nonzero(seen)[0]


# --- Substructures ---

def subloop_generated(Q: CayleyLoop, gens: Sequence[int]) -> Subloop:
    """Smallest subloop containing gens; multiplicative closure suffices in a finite loop."""
    T = Q.table
    mark = np.zeros(Q.order, dtype=bool)
    mark[0] = True
    elems = [0]
    for g in gens:
        if not mark[g]:
            mark[g] = True
            elems.append(int(g))

    i = 0
    while i < len(elems):
        e = elems[i]
        current = np.array(elems[:i + 1])
        for products in (T[e, current], T[current, e]):
            for v in products:
                if not mark[v]:
                    mark[v] = True
                    elems.append(int(v))
        i += 1
    return Subloop(Q, tuple(int(v) for v in np.nonzero(mark)[0]))


def _normality_violation(Q: CayleyLoop, mask: np.ndarray) -> Optional[Tuple[str, int, int]]:
    """(inner mapping label, h, image) for some h in H moved outside H, or None."""
    members = np.nonzero(mask)[0]
    for kind, y, rows in _inner_batches(Q, commutative_only=Q.is_commutative):
        images = rows[:, members]
        bad = np.argwhere(~mask[images])
        if bad.size:
            x, j = (int(v) for v in bad[0])
            label = f"T[{x}]" if kind == "T" else f"{kind}[{x},{y}]"
            return label, int(members[j]), int(images[x, j])
    return None


def normal_closure(Q: CayleyLoop, gens: Sequence[int]) -> Subloop:
    """Smallest normal subloop containing gens."""
    H = subloop_generated(Q, gens)
    while True:
        mask = H.mask
        members = np.array(H.members)
        outside = set()
        for _, _, rows in _inner_batches(Q, commutative_only=Q.is_commutative):
            images = rows[:, members]
            outside.update(int(v) for v in np.unique(images[~mask[images]]))
        if not outside:
            return H
        H = subloop_generated(Q, list(H.members) + sorted(outside))


def _in_left_nucleus(T: np.ndarray, z: int) -> bool:
    # (za)b = z(ab)
    return bool(np.array_equal(T[T[z]], T[z][T]))


def _in_middle_nucleus(T: np.ndarray, z: int) -> bool:
    # (az)b = a(zb)
    n = T.shape[0]
    return bool(np.array_equal(T[T[:, z]], T[np.arange(n)[:, None], T[z][None, :]]))


def _in_right_nucleus(T: np.ndarray, z: int) -> bool:
    # (ab)z = a(bz)
    n = T.shape[0]
    return bool(np.array_equal(T[:, z][T], T[np.arange(n)[:, None], T[:, z][None, :]]))


def _subloop_of(Q: CayleyLoop, members) -> Subloop:
    return Subloop(Q, tuple(sorted(int(m) for m in members)))


def center(Q: CayleyLoop) -> Subloop:
    T = Q.table
    commuting = np.nonzero((T == T.T).all(axis=1))[0]
    members = [
        int(z) for z in commuting
        if _in_left_nucleus(T, z) and _in_middle_nucleus(T, z) and _in_right_nucleus(T, z)
    ]
    return _subloop_of(Q, members)


def associator_subloop(Q: CayleyLoop) -> Subloop:
    return normal_closure(Q, [int(v) for v in associator_values(Q)])


def invariant_subsets(Q: CayleyLoop) -> InvariantSubsets:
    """Center, the three nuclei, the nucleus and the associator subloop."""
    T = Q.table
    n = Q.order
    left = [z for z in range(n) if _in_left_nucleus(T, z)]
    middle = [z for z in range(n) if _in_middle_nucleus(T, z)]
    right = [z for z in range(n) if _in_right_nucleus(T, z)]
    nucleus = sorted(set(left) & set(middle) & set(right))
    commuting = set(int(z) for z in np.nonzero((T == T.T).all(axis=1))[0])
    return InvariantSubsets(
        center=_subloop_of(Q, commuting.intersection(nucleus)),
        left_nucleus=_subloop_of(Q, left),
        middle_nucleus=_subloop_of(Q, middle),
        right_nucleus=_subloop_of(Q, right),
        nucleus=_subloop_of(Q, nucleus),
        associator_subloop=associator_subloop(Q),
    )


def quotient(Q: CayleyLoop, H: Subloop, debug: Optional[bool] = None) -> QuotientResult:
    """
    Coset loop Q/H with the identity coset at index 0, plus the element -> coset map.

    Normality is checked against every inner generator first; a violation raises
    NotNormalError naming the inner mapping.
    """
    mask = H.mask
    violation = _normality_violation(Q, mask)
    if violation is not None:
        label, h, image = violation
        raise NotNormalError(f"subloop not normal: {label} maps {h} to {image}", witness=violation)

    T = Q.table
    members = np.array(H.members)
    coset_map = np.full(Q.order, -1, dtype=np.int32)
    reps = []
    for x in range(Q.order):
        if coset_map[x] < 0:
            coset_map[T[x, members]] = len(reps)
            reps.append(x)
    reps = np.array(reps)
    table = coset_map[T[np.ix_(reps, reps)]]

    if debug is None:
        debug = get_settings().debug
    if debug:
        if not np.array_equal(coset_map[T], table[coset_map[:, None], coset_map[None, :]]):
            raise NotNormalError("subloop not normal: coset multiplication is not well defined")

    return QuotientResult(build_loop(table, order_cap=max(len(reps), 1)), coset_map)


# --- Powers and profile ---

def power_table(Q: CayleyLoop, kmax: int) -> np.ndarray:
    """P[k, x] = x^k with left-bracketed powers x^(k+1) = x * x^k."""
    T = Q.table
    ar = np.arange(Q.order)
    P = np.zeros((kmax + 1, Q.order), dtype=np.int32)
    for k in range(kmax):
        P[k + 1] = T[ar, P[k]]
    return P


def power(Q: CayleyLoop, x: int, k: int) -> int:
    result = 0
    for _ in range(k):
        result = int(Q.table[x, result])
    return result


def element_orders(Q: CayleyLoop) -> np.ndarray:
    """Smallest k >= 1 with x^k = 0 for every x; L_x permutes 0 back within n steps."""
    P = power_table(Q, Q.order)
    return np.argmax(P[1:] == 0, axis=0) + 1


def element_order(Q: CayleyLoop, x: int) -> int:
    k, value = 1, x
    while value != 0:
        value = int(Q.table[x, value])
        k += 1
    return k


def is_power_associative(Q: CayleyLoop) -> bool:
    """x^i x^j = x^(i+j) for every x and every split with i + j <= n."""
    n = Q.order
    T = Q.table
    P = power_table(Q, n)
    for i in range(1, n):
        lhs = T[P[i][None, :], P[1:n - i + 1]]
        if not np.array_equal(lhs, P[i + 1:n + 1]):
            return False
    return True


def nilpotency_class(Q: CayleyLoop) -> Union[int, Literal["not nilpotent"]]:
    current, cls = Q, 0
    while current.order > 1:
        Z = center(current)
        if len(Z) == 1:
            return "not nilpotent"
        current = quotient(current, Z, debug=False).loop
        cls += 1
    return cls


def structure_profile(Q: CayleyLoop) -> StructureProfile:
    orders = element_orders(Q)
    return StructureProfile(
        order=Q.order,
        order_spectrum=dict(sorted(Counter(int(o) for o in orders).items())),
        center_size=len(center(Q)),
        associator_subloop_size=len(associator_subloop(Q)),
        nilpotency_class=nilpotency_class(Q),
        is_group=is_group(Q),
        is_commutative=is_commutative(Q),
        is_power_associative=is_power_associative(Q),
    )


# --- Isomorphism ---

PROFILE_FIELDS = (
    "order_spectrum", "center_size", "associator_subloop_size",
    "is_commutative", "is_group", "nilpotency_class", "is_power_associative",
)


def profile_difference(a: StructureProfile, b: StructureProfile) -> Optional[str]:
    """Name of the first invariant on which two profiles disagree."""
    for name in PROFILE_FIELDS:
        if getattr(a, name) != getattr(b, name):
            return name
    return None


def _signatures(Q: CayleyLoop) -> List[Tuple[int, bool, bool]]:
    orders = element_orders(Q)
    zmask = center(Q).mask
    amask = associator_subloop(Q).mask
    return [(int(orders[x]), bool(zmask[x]), bool(amask[x])) for x in range(Q.order)]


def _generating_sequence(Q: CayleyLoop, orders: np.ndarray) -> List[int]:
    """Greedy generators, each of largest order among elements not yet reached."""
    gens: List[int] = []
    H = subloop_generated(Q, gens)
    while len(H) < Q.order:
        mask = H.mask
        outside = np.nonzero(~mask)[0]
        gens.append(int(outside[np.argmax(orders[outside])]))
        H = subloop_generated(Q, gens)
    return gens


def is_isomorphic(
    Q1: CayleyLoop,
    Q2: CayleyLoop,
    node_budget: Optional[int] = None,
    profiles: Optional[Tuple[StructureProfile, StructureProfile]] = None,
) -> IsoResult:
    """
    Search for an isomorphism Q1 -> Q2.

    Profiles are compared first. The backtracking then maps a greedy generating
    sequence of Q1 onto elements of matching signature (order, center membership,
    associator-subloop membership), propagating each choice through all products.
    Raises BudgetExceeded once more than node_budget candidates were tried.
    """
    budget = node_budget or get_settings().iso_node_budget
    if Q1.order != Q2.order:
        return IsoResult(False, None, 0, "orders differ")

    p1, p2 = profiles or (structure_profile(Q1), structure_profile(Q2))
    if (field := profile_difference(p1, p2)) is not None:
        return IsoResult(False, None, 0, f"{field} differs")

    sig1, sig2 = _signatures(Q1), _signatures(Q2)
    if Counter(sig1) != Counter(sig2):
        return IsoResult(False, None, 0, "signature classes differ")

    n = Q1.order
    T1, T2 = Q1.table, Q2.table
    gens = _generating_sequence(Q1, element_orders(Q1))
    by_sig: Dict[Tuple, List[int]] = {}
    for y in range(n):
        by_sig.setdefault(sig2[y], []).append(y)

    nodes = 0

    def propagate(f: np.ndarray, used: np.ndarray, start: int) -> bool:
        domain = [x for x in range(n) if f[x] >= 0]
        queue = [start]
        while queue:
            u = queue.pop()
            for v in list(domain):
                for a, b in ((u, v), (v, u)):
                    c = int(T1[a, b])
                    img = int(T2[f[a], f[b]])
                    if f[c] < 0:
                        if used[img] or sig1[c] != sig2[img]:
                            return False
                        f[c] = img
                        used[img] = True
                        domain.append(c)
                        queue.append(c)
                    elif f[c] != img:
                        return False
        return True

    def search(i: int, f: np.ndarray, used: np.ndarray) -> Optional[np.ndarray]:
        nonlocal nodes
        if i == len(gens):
            return f
        g = gens[i]
        if f[g] >= 0:
            return search(i + 1, f, used)
        for y in by_sig[sig1[g]]:
            if used[y]:
                continue
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded(f"budget exceeded: {budget} nodes", witness=nodes)
            f2, used2 = f.copy(), used.copy()
            f2[g] = y
            used2[y] = True
            if propagate(f2, used2, g):
                found = search(i + 1, f2, used2)
                if found is not None:
                    return found
        return None

    f0 = np.full(n, -1, dtype=np.int64)
    used0 = np.zeros(n, dtype=bool)
    f0[0] = 0
    used0[0] = True
    mapping = search(0, f0, used0)
    if mapping is None:
        logger.debug(f"Exhausted isomorphism search after {nodes} nodes")
        return IsoResult(False, None, nodes, "exhaustive search found no isomorphism")

    if not np.array_equal(mapping[T1], T2[mapping[:, None], mapping[None, :]]):
        raise LoopError("isomorphism search produced a non-homomorphism")
    return IsoResult(True, mapping, nodes, "explicit isomorphism")


def apply_isomorphism(Q1: CayleyLoop, mapping: np.ndarray) -> np.ndarray:
    """Table of Q1 relabelled by mapping; equals Q2's table for an isomorphism Q1 -> Q2."""
    n = Q1.order
    relabelled = np.empty((n, n), dtype=np.int32)
    relabelled[np.ix_(mapping, mapping)] = mapping[Q1.table]
    return relabelled


# --- Abelian groups and named loops ---

@dataclass(frozen=True)
class AbelianGroup:
    """Z_m1 x ... x Z_mk with mixed-radix indices, first coordinate most significant."""
    moduli: Tuple[int, ...]

    @property
    def order(self) -> int:
        return int(np.prod(self.moduli))

    @property
    def name(self) -> str:
        return "x".join(f"Z{m}" for m in self.moduli)

    @property
    def weights(self) -> np.ndarray:
        w = np.ones(len(self.moduli), dtype=np.int64)
        for i in range(len(self.moduli) - 2, -1, -1):
            w[i] = w[i + 1] * self.moduli[i + 1]
        return w

    def encode(self, element: Sequence[int]) -> int:
        return int(np.dot(np.mod(element, self.moduli), self.weights))

    def decode(self, index: int) -> Tuple[int, ...]:
        return tuple(int(v) for v in (index // self.weights) % np.array(self.moduli))

    def elements(self) -> np.ndarray:
        """Coordinates of every element, row i for index i."""
        idx = np.arange(self.order)
        return (idx[:, None] // self.weights[None, :]) % np.array(self.moduli)[None, :]

    def add(self, a: Sequence[int], b: Sequence[int]) -> Tuple[int, ...]:
        return tuple(int(v) for v in np.mod(np.add(a, b), self.moduli))


def abelian_group_loop(moduli: Sequence[int], order_cap: Optional[int] = None) -> CayleyLoop:
    G = AbelianGroup(tuple(moduli))
    cap = order_cap or get_settings().order_cap
    if G.order > cap:
        raise OrderCapExceeded(f"order cap exceeded: {G.name} has order {G.order} > {cap}")
    coords = G.elements()
    sums = (coords[:, None, :] + coords[None, :, :]) % np.array(G.moduli)
    return CayleyLoop((sums @ G.weights).astype(np.int32))


def catalog_groups(p: int, order_cap: Optional[int] = None) -> List[Tuple[AbelianGroup, CayleyLoop]]:
    """(Z_p)^3, Z_p x Z_p^2 and Z_p^3."""
    cap = order_cap or get_settings().order_cap
    if p ** 3 > cap:
        raise OrderCapExceeded(f"order cap exceeded: {p ** 3} > {cap}")
    groups = [AbelianGroup((p, p, p)), AbelianGroup((p, p * p)), AbelianGroup((p ** 3,))]
    return [(G, abelian_group_loop(G.moduli, cap)) for G in groups]


EXCEPTIONAL_8 = (
    (0, 1, 2, 3, 4, 5, 6, 7),
    (1, 0, 3, 2, 5, 4, 7, 6),
    (2, 3, 0, 1, 6, 7, 4, 5),
    (3, 2, 1, 0, 7, 6, 5, 4),
    (4, 5, 6, 7, 0, 3, 1, 2),
    (5, 4, 7, 6, 3, 0, 2, 1),
    (6, 7, 4, 5, 1, 2, 0, 3),
    (7, 6, 5, 4, 2, 1, 3, 0),
)


def exceptional_loop_8() -> CayleyLoop:
    """The commutative automorphic loop of order 8 with trivial center."""
    return build_loop(np.array(EXCEPTIONAL_8, dtype=np.int32), order_cap=8)
