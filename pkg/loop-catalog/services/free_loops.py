"""
Closed-form arithmetic for the free 2-generated commutative automorphic loop F of
nilpotency class two and its quotient F_p.

F lives on integer 4-tuples (a1, a2, a3, a4) = x1^a1 x2^a2 z1^a3 z2^a4 with
z1 = (x1, x1, x2) and z2 = (x1, x2, x2). F_p lives on 6-tuples over Z_p; the last
four coordinates span the center in the basis x^p, y^p, (x,x,y), (x,y,y).

The *_arrays functions take coordinate-first numpy arrays of shape (k, ...) and are
what the table builders use; the scalar functions wrap them.
"""

import logging
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from config_loader import get_settings
from errors import CocycleError, DecompositionMismatch, LoopError, OrderCapExceeded
from services.loop_core import AbelianGroup, CayleyLoop, abelian_group_loop

logger = logging.getLogger(__name__)


class FreeElement(NamedTuple):
    a1: int
    a2: int
    a3: int
    a4: int

    def __str__(self) -> str:
        return ",".join(str(v) for v in self)


class FpElement(NamedTuple):
    a1: int
    a2: int
    a3: int
    a4: int
    a5: int
    a6: int


class ZVector(NamedTuple):
    """Central element of F_p in the basis x^p, y^p, (x,x,y), (x,y,y)."""
    c1: int
    c2: int
    c3: int
    c4: int


FREE_IDENTITY = FreeElement(0, 0, 0, 0)
FP_IDENTITY = FpElement(0, 0, 0, 0, 0, 0)


# --- Text forms ---

def parse_free(text: str) -> FreeElement:
    """Parse "a1,a2,a3,a4" (signs allowed)."""
    parts = [tok.strip() for tok in text.split(",")]
    if len(parts) != 4:
        raise ValueError(f"expected 4 comma-separated integers, got {text!r}")
    return FreeElement(*(int(tok) for tok in parts))


def parse_fp(text: str) -> Tuple[int, FpElement]:
    """Parse "p:a1,a2,a3,a4,a5,a6" into (p, element reduced mod p)."""
    head, sep, body = text.partition(":")
    if not sep:
        raise ValueError(f"expected 'p:a1,...,a6', got {text!r}")
    p = int(head)
    parts = [tok.strip() for tok in body.split(",")]
    if len(parts) != 6:
        raise ValueError(f"expected 6 coordinates after '{head}:', got {len(parts)}")
    return p, FpElement(*(int(tok) % p for tok in parts))


def format_fp(p: int, u: Sequence[int]) -> str:
    return f"{p}:" + ",".join(str(int(v)) for v in u)


# --- Overflow indicator ---

def overflow(p: int, a: int, b: int) -> int:
    """1 iff a + b >= p, for residues 0 <= a, b < p."""
    return 1 if a + b >= p else 0


def bracket(p: int, k: int, a: int) -> int:
    """[k, a]_p = sum of overflow(a, i*a mod p) for i = 1..k-1; zero for k <= 1."""
    return sum(overflow(p, a, (i * a) % p) for i in range(1, k))


def _bracket_arrays(p: int, k: int, a):
    # the overflows count the carries of a + a + ... + a, hence floor(k*a/p)
    return (k * a) // p


# --- F ---

def free_mul(u: Sequence[int], v: Sequence[int]) -> FreeElement:
    a1, a2, a3, a4 = u
    b1, b2, b3, b4 = v
    return FreeElement(
        a1 + b1,
        a2 + b2,
        a3 + b3 - a1 * b1 * (a2 + b2),
        a4 + b4 + a2 * b2 * (a1 + b1),
    )


def free_ldiv(u: Sequence[int], v: Sequence[int]) -> FreeElement:
    """The unique w with free_mul(u, w) = v."""
    a1, a2, a3, a4 = u
    v1, v2, v3, v4 = v
    w1, w2 = v1 - a1, v2 - a2
    return FreeElement(
        w1,
        w2,
        v3 - a3 + a1 * w1 * (a2 + w2),
        v4 - a4 - a2 * w2 * (a1 + w1),
    )


def free_associator(u: Sequence[int], v: Sequence[int], w: Sequence[int]) -> FreeElement:
    a1, a2 = u[0], u[1]
    b1, b2 = v[0], v[1]
    c1, c2 = w[0], w[1]
    det = a1 * c2 - a2 * c1
    return FreeElement(0, 0, b1 * det, b2 * det)


def free_associator_definitional(u, v, w) -> FreeElement:
    return free_ldiv(free_mul(u, free_mul(v, w)), free_mul(free_mul(u, v), w))


def project_to_fp(p: int, u: Sequence[int]) -> FpElement:
    """Image of u under F -> F_p; a1, a2 are read mod p^2 and split into two p-adic digits."""
    a1, a2, a3, a4 = u
    q = p * p
    return FpElement(a1 % p, a2 % p, (a1 % q) // p, (a2 % q) // p, a3 % p, a4 % p)


def in_kp(p: int, u: Sequence[int]) -> bool:
    """Membership in K_p, the kernel of project_to_fp."""
    a1, a2, a3, a4 = u
    return a1 % (p * p) == 0 and a2 % (p * p) == 0 and a3 % p == 0 and a4 % p == 0


# --- F_p ---

def fp_mul_arrays(p: int, U, V) -> np.ndarray:
    a1, a2, a3, a4, a5, a6 = U
    b1, b2, b3, b4, b5, b6 = V
    s1, s2 = a1 + b1, a2 + b2
    return np.stack([
        s1,
        s2,
        a3 + b3 + (s1 >= p),
        a4 + b4 + (s2 >= p),
        a5 + b5 - a1 * b1 * s2,
        a6 + b6 + a2 * b2 * s1,
    ]).astype(np.int64) % p


def fp_ldiv_arrays(p: int, U, V) -> np.ndarray:
    u1, u2, u3, u4, u5, u6 = U
    v1, v2, v3, v4, v5, v6 = V
    w1 = (v1 - u1) % p
    w2 = (v2 - u2) % p
    return np.stack([
        w1,
        w2,
        v3 - u3 - (u1 + w1 >= p),
        v4 - u4 - (u2 + w2 >= p),
        v5 - u5 + u1 * w1 * (u2 + w2),
        v6 - u6 - u2 * w2 * (u1 + w1),
    ]).astype(np.int64) % p


def power_correction(k: int) -> int:
    """sum of i + i^2 for i = 1..k-1."""
    return (k - 1) * k // 2 + (k - 1) * k * (2 * k - 1) // 6


def fp_pow_arrays(p: int, U, k: int) -> np.ndarray:
    a1, a2, a3, a4, a5, a6 = U
    t = power_correction(k)
    return np.stack([
        k * a1,
        k * a2,
        k * a3 + _bracket_arrays(p, k, a1),
        k * a4 + _bracket_arrays(p, k, a2),
        k * a5 - a1 * a1 * a2 * t,
        k * a6 + a1 * a2 * a2 * t,
    ]).astype(np.int64) % p


def fp_associator_arrays(p: int, U, V, W) -> np.ndarray:
    i1, i2 = U[0], U[1]
    j1, j2 = V[0], V[1]
    k1, k2 = W[0], W[1]
    det = i1 * k2 - i2 * k1
    zero = np.zeros_like(np.asarray(det))
    return np.stack([zero, zero, zero, zero, j1 * det, j2 * det]).astype(np.int64) % p


def _as_column(u: Sequence[int]) -> np.ndarray:
    return np.asarray(u, dtype=np.int64)


def _to_element(arr: np.ndarray) -> FpElement:
    return FpElement(*(int(v) for v in arr))


def fp_element(p: int, coords: Sequence[int]) -> FpElement:
    return FpElement(*(int(v) % p for v in coords))


def fp_mul(p: int, u: Sequence[int], v: Sequence[int]) -> FpElement:
    return _to_element(fp_mul_arrays(p, _as_column(u), _as_column(v)))


def fp_ldiv(p: int, u: Sequence[int], v: Sequence[int]) -> FpElement:
    """The unique w with fp_mul(p, u, w) = v, by back-substitution."""
    return _to_element(fp_ldiv_arrays(p, _as_column(u), _as_column(v)))


def fp_pow(p: int, u: Sequence[int], k: int) -> FpElement:
    """u^k; k = 0 gives the identity."""
    if k < 0:
        raise ValueError(f"exponent must be nonnegative, got {k}")
    return _to_element(fp_pow_arrays(p, _as_column(u), k))


def fp_associator(p: int, u, v, w) -> FpElement:
    return _to_element(fp_associator_arrays(p, _as_column(u), _as_column(v), _as_column(w)))


def fp_associator_definitional(p: int, u, v, w) -> FpElement:
    return fp_ldiv(p, fp_mul(p, u, fp_mul(p, v, w)), fp_mul(p, fp_mul(p, u, v), w))


def fp_generators(p: int) -> Tuple[FpElement, FpElement]:
    return FpElement(1, 0, 0, 0, 0, 0), FpElement(0, 1, 0, 0, 0, 0)


def fp_central(p: int, c: Sequence[int]) -> FpElement:
    """The central element with coordinates c in the basis x^p, y^p, (x,x,y), (x,y,y)."""
    return fp_element(p, (0, 0, *c))


def central_coordinates(p: int, u: Sequence[int]) -> ZVector:
    u = fp_element(p, u)
    if u.a1 or u.a2:
        raise LoopError(f"{format_fp(p, u)} is not central", witness=u)
    return ZVector(u.a3, u.a4, u.a5, u.a6)


def central_basis(p: int) -> Tuple[FpElement, ...]:
    """x^p, y^p, (x,x,y), (x,y,y), computed from the generators rather than read off."""
    x, y = fp_generators(p)
    return fp_pow(p, x, p), fp_pow(p, y, p), fp_associator(p, x, x, y), fp_associator(p, x, y, y)


# --- Indexing and tables ---

def fp_encode(p: int, u: Sequence[int]) -> int:
    """Base-p index with a1 most significant; the identity gets index 0."""
    index = 0
    for v in u:
        index = index * p + int(v)
    return index


def fp_decode_arrays(p: int, indices) -> np.ndarray:
    idx = np.asarray(indices, dtype=np.int64)
    return np.stack([(idx // p ** (5 - i)) % p for i in range(6)])


def fp_decode(p: int, index: int) -> FpElement:
    return _to_element(fp_decode_arrays(p, index))


def fp_encode_arrays(p: int, U) -> np.ndarray:
    index = np.zeros(np.shape(U[0]), dtype=np.int64)
    for coord in U:
        index = index * p + coord
    return index


class FpTable(NamedTuple):
    loop: CayleyLoop
    elements: np.ndarray  # elements[i] = coordinates of index i


def fp_cayley(p: int, order_cap: Optional[int] = None) -> FpTable:
    """Materialise F_p as a CayleyLoop of order p^6."""
    n = p ** 6
    cap = order_cap or get_settings().order_cap
    if n > cap:
        raise OrderCapExceeded(f"order cap exceeded: F_{p} has order {n} > {cap}")

    logger.info(f"Materialising F_{p} ({n} elements)")
    coords = fp_decode_arrays(p, np.arange(n))
    rows = []
    for start in range(0, n, 64):
        U = coords[:, start:start + 64, None]
        V = coords[:, None, :]
        rows.append(fp_encode_arrays(p, fp_mul_arrays(p, U, V)))
    table = np.concatenate(rows).astype(np.int32)
    return FpTable(CayleyLoop(table), coords.T.copy())


def canonical_word(p: int, u: Sequence[int]) -> FpElement:
    """
    Exponents (a1..a6) with u = x^a1 y^a2 (x^p)^a3 (y^p)^a4 (x,x,y)^a5 (x,y,y)^a6.

    The exponents are the coordinates themselves; the word is re-evaluated left to
    right as a self-check and DecompositionMismatch signals an arithmetic bug.
    """
    exponents = fp_element(p, u)
    x, y = fp_generators(p)
    factors = (x, y) + central_basis(p)
    value = FP_IDENTITY
    for base, e in zip(factors, exponents):
        value = fp_mul(p, value, fp_pow(p, base, e))
    if value != exponents:
        raise DecompositionMismatch(
            f"decomposition mismatch: word {tuple(exponents)} evaluates to {tuple(value)}",
            witness=(tuple(exponents), tuple(value)),
        )
    return exponents


# --- Central extensions ---

@dataclass(frozen=True)
class Cocycle:
    """theta: L x L -> Z as an index array, values[i, j] = index of theta(l_i, l_j) in Z."""
    base_group: AbelianGroup
    fiber_group: AbelianGroup
    values: np.ndarray

    @classmethod
    def from_function(
        cls,
        base: AbelianGroup,
        fiber: AbelianGroup,
        fn: Callable[[Tuple[int, ...], Tuple[int, ...]], Sequence[int]],
    ) -> "Cocycle":
        n = base.order
        values = np.zeros((n, n), dtype=np.int32)
        for i in range(n):
            a = base.decode(i)
            for j in range(n):
                values[i, j] = fiber.encode(fn(a, base.decode(j)))
        return cls(base, fiber, values)

    def normalization_violation(self) -> Optional[Tuple[int, int]]:
        bad = np.nonzero(self.values[0] != 0)[0]
        if bad.size:
            return 0, int(bad[0])
        bad = np.nonzero(self.values[:, 0] != 0)[0]
        if bad.size:
            return int(bad[0]), 0
        return None


class CentralExtension(NamedTuple):
    loop: CayleyLoop
    base_table: np.ndarray
    fiber_table: np.ndarray
    cocycle: Cocycle

    @property
    def fiber_order(self) -> int:
        return int(self.fiber_table.shape[0])

    def associator(self, a: int, b: int, c: int) -> int:
        """
        theta(x1,x2) theta(x1x2,x3) theta(x2,x3)^-1 theta(x1,x2x3)^-1 for the base
        parts of a, b, c. The result lies in the fiber, so its index is the fiber index.
        """
        m = self.fiber_order
        x1, x2, x3 = a // m, b // m, c // m
        L, Z, th = self.base_table, self.fiber_table, self.cocycle.values
        neg = np.argsort(Z, axis=1)[:, 0]  # neg[z] = -z
        plus = Z[th[x1, x2], th[L[x1, x2], x3]]
        minus = Z[th[x2, x3], th[x1, L[x2, x3]]]
        return int(Z[plus, neg[minus]])


def central_extension(
    fiber: AbelianGroup,
    base: AbelianGroup,
    theta: Cocycle,
    order_cap: Optional[int] = None,
) -> CentralExtension:
    """Loop on L x Z with (x1, z1)(x2, z2) = (x1 x2, z1 z2 theta(x1, x2)); index = l * |Z| + z."""
    if (bad := theta.normalization_violation()) is not None:
        raise CocycleError(f"cocycle not normalized at {bad}", witness=bad)

    n = base.order * fiber.order
    cap = order_cap or get_settings().order_cap
    if n > cap:
        raise OrderCapExceeded(f"order cap exceeded: extension of order {n} > {cap}")

    L = abelian_group_loop(base.moduli, cap).table
    Z = abelian_group_loop(fiber.moduli, cap).table
    m = fiber.order
    idx = np.arange(n)
    x, z = idx // m, idx % m
    xs = L[x[:, None], x[None, :]]
    zs = Z[Z[z[:, None], z[None, :]], theta.values[x[:, None], x[None, :]]]
    return CentralExtension(CayleyLoop((xs * m + zs).astype(np.int32)), L, Z, theta)


def fp_cocycle(p: int) -> Cocycle:
    """Cocycle presenting F_p as an extension of (Z_p)^4 by (Z_p)^2."""
    base = AbelianGroup((p, p))
    fiber = AbelianGroup((p, p, p, p))

    def theta(a, b):
        a1, a2 = a
        b1, b2 = b
        return (
            overflow(p, a1, b1),
            overflow(p, a2, b2),
            -a1 * b1 * (a2 + b2),
            a2 * b2 * (a1 + b1),
        )

    return Cocycle.from_function(base, fiber, theta)


def free_cocycle_mod(p: int) -> Cocycle:
    """The cocycle of F with both groups reduced mod p; the extension is F_p modulo <x^p, y^p>."""
    base = AbelianGroup((p, p))
    fiber = AbelianGroup((p, p))

    def theta(a, b):
        a1, a2 = a
        b1, b2 = b
        return -a1 * b1 * (a2 + b2), a2 * b2 * (a1 + b1)

    return Cocycle.from_function(base, fiber, theta)
