"""
GL2(p) acting on the center of F_p, orbits on its 3-dimensional subspaces, the
quotient loops they give, and the certified catalog of order p^3.

Central vectors are rows in the basis x^p, y^p, (x,x,y), (x,y,y); a matrix acts on
them from the right, so action_matrix(rs) = action_matrix(r) @ action_matrix(s).
A 3-dimensional subspace is stored with its RREF basis and the normalized linear
functional whose kernel it is.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from config_loader import get_settings
from errors import CertificationError, LoopError, OutsideVarietyError, UnlabeledOrbitError
from schemas import (
    PRIME_CEILING,
    CatalogEntry,
    Certificates,
    ClassificationReport,
    OrbitEntry,
    OrbitReport,
    StructureProfile,
    is_prime,
)
from services.free_loops import (
    central_coordinates,
    fp_associator,
    fp_cayley,
    fp_decode_arrays,
    fp_mul_arrays,
    fp_pow,
)
from services.loop_core import (
    CayleyLoop,
    associator_slice,
    build_loop,
    element_orders,
    center,
    is_automorphic,
    is_commutative,
    is_isomorphic,
    power_table,
    profile_difference,
    structure_profile,
    subloop_generated,
)
from table_format import format_table

logger = logging.getLogger(__name__)

DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"

LABELS = ("O1", "O2", "O3", "O4", "O5")


def labels_for(p: int) -> Tuple[str, ...]:
    return LABELS[:4] if p == 2 else LABELS


def _require_prime(p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p > PRIME_CEILING:
        raise ValueError(f"p={p} exceeds the hard ceiling {PRIME_CEILING}")


# --- GL2(p) and its action ---

class Mat2(NamedTuple):
    """(a1 a2; b1 b2) over Z_p."""
    a1: int
    a2: int
    b1: int
    b2: int

    def det(self, p: int) -> int:
        return (self.a1 * self.b2 - self.a2 * self.b1) % p


def mat2_mul(p: int, r: Mat2, s: Mat2) -> Mat2:
    return Mat2(
        (r.a1 * s.a1 + r.a2 * s.b1) % p,
        (r.a1 * s.a2 + r.a2 * s.b2) % p,
        (r.b1 * s.a1 + r.b2 * s.b1) % p,
        (r.b1 * s.a2 + r.b2 * s.b2) % p,
    )


def mat2_inverse(p: int, r: Mat2) -> Mat2:
    d = pow(r.det(p), -1, p)
    return Mat2((r.b2 * d) % p, (-r.a2 * d) % p, (-r.b1 * d) % p, (r.a1 * d) % p)


def gl2_enumerate(p: int) -> List[Mat2]:
    """All invertible 2x2 matrices over Z_p, identity first."""
    identity = Mat2(1, 0, 0, 1)
    mats = [identity]
    for entries in product(range(p), repeat=4):
        m = Mat2(*entries)
        if m != identity and m.det(p) != 0:
            mats.append(m)
    return mats


def primitive_root(p: int) -> int:
    for g in range(1, p):
        if len({pow(g, k, p) for k in range(1, p)}) == p - 1:
            return g
    raise ValueError(f"no primitive root mod {p}")


def gl2_generators(p: int) -> List[Mat2]:
    """Two transvections generate SL2(p); diag(g, 1) supplies the determinants."""
    return [Mat2(1, 1, 0, 1), Mat2(1, 0, 1, 1), Mat2(primitive_root(p), 0, 0, 1)]


def action_matrix(p: int, rho: Mat2) -> np.ndarray:
    """4x4 matrix whose rows are the images of x^p, y^p, (x,x,y), (x,y,y)."""
    a1, a2, b1, b2 = rho
    d = rho.det(p)
    c = 1 if p == 3 else 0
    M = np.array([
        [a1, a2, c * a1 * a1 * a2, -c * a1 * a2 * a2],
        [b1, b2, c * b1 * b1 * b2, -c * b1 * b2 * b2],
        [0, 0, a1 * d, a2 * d],
        [0, 0, b1 * d, b2 * d],
    ], dtype=np.int64)
    return M % p


def induced_action_matrix(p: int, rho: Mat2) -> np.ndarray:
    """
    The same matrix computed inside F_p: send x, y to (a1, a2, 0..), (b1, b2, 0..)
    and read off the central coordinates of the images of the central basis.
    """
    X = (rho.a1, rho.a2, 0, 0, 0, 0)
    Y = (rho.b1, rho.b2, 0, 0, 0, 0)
    images = (fp_pow(p, X, p), fp_pow(p, Y, p), fp_associator(p, X, X, Y), fp_associator(p, X, Y, Y))
    return np.array([central_coordinates(p, img) for img in images], dtype=np.int64)


# --- Subspaces ---

def rref(p: int, rows) -> np.ndarray:
    """Reduced row echelon form over Z_p with zero rows dropped."""
    M = np.array(rows, dtype=np.int64) % p
    r = 0
    for c in range(M.shape[1]):
        if r == M.shape[0]:
            break
        nz = np.nonzero(M[r:, c])[0]
        if nz.size == 0:
            continue
        pivot = r + int(nz[0])
        M[[r, pivot]] = M[[pivot, r]]
        M[r] = (M[r] * pow(int(M[r, c]), -1, p)) % p
        for i in range(M.shape[0]):
            if i != r and M[i, c]:
                M[i] = (M[i] - M[i, c] * M[r]) % p
        r += 1
    return M[:r]


def _normalize_lines(p: int, F: np.ndarray) -> np.ndarray:
    """Scale every nonzero row so its first nonzero entry is 1."""
    inverses = np.array([0] + [pow(a, -1, p) for a in range(1, p)], dtype=np.int64)
    lead = F[np.arange(F.shape[0]), np.argmax(F != 0, axis=1)]
    return (F * inverses[lead][:, None]) % p


def _line_index(p: int, F: np.ndarray) -> np.ndarray:
    return F @ (p ** np.arange(F.shape[-1] - 1, -1, -1))


@dataclass(frozen=True)
class Subspace3:
    """A 3-dimensional subspace N of Z(F_p), N = ker(normal)."""
    p: int
    basis: Tuple[Tuple[int, ...], ...]
    normal: Tuple[int, ...]

    @classmethod
    def from_rows(cls, p: int, rows) -> "Subspace3":
        basis = rref(p, rows)
        if basis.shape[0] != 3:
            raise ValueError(f"rows span a subspace of dimension {basis.shape[0]}, expected 3")
        return cls(p, tuple(tuple(int(v) for v in row) for row in basis), _normal_of(p, basis))

    @classmethod
    def from_normal(cls, p: int, f: Sequence[int]) -> "Subspace3":
        f = tuple(int(v) % p for v in f)
        k = next(i for i, v in enumerate(f) if v)
        fk_inv = pow(f[k], -1, p)
        rows = []
        for j in range(4):
            if j == k:
                continue
            row = [0, 0, 0, 0]
            row[j] = 1
            row[k] = (-f[j] * fk_inv) % p
            rows.append(row)
        return cls.from_rows(p, rows)

    @property
    def key(self) -> str:
        """Row-major digits of the RREF basis."""
        return "".join(DIGITS[v] for row in self.basis for v in row)

    def as_array(self) -> np.ndarray:
        return np.array(self.basis, dtype=np.int64)

    def contains(self, vector: Sequence[int]) -> bool:
        return int(np.dot(self.normal, vector)) % self.p == 0

    def image(self, M: np.ndarray) -> "Subspace3":
        return Subspace3.from_rows(self.p, self.as_array() @ M)

    def elements(self) -> np.ndarray:
        """All p^3 vectors of the subspace, one per row."""
        coeffs = np.array(list(product(range(self.p), repeat=3)), dtype=np.int64)
        return (coeffs @ self.as_array()) % self.p


def _normal_of(p: int, basis: np.ndarray) -> Tuple[int, ...]:
    pivots = [int(np.argmax(row != 0)) for row in basis]
    free = next(c for c in range(4) if c not in pivots)
    f = np.zeros(4, dtype=np.int64)
    f[free] = 1
    for row, c in zip(basis, pivots):
        f[c] = -row[free] % p
    f = _normalize_lines(p, f[None, :])[0]
    return tuple(int(v) for v in f)


def _dual_lines(p: int) -> np.ndarray:
    """Every nonzero functional on (Z_p)^4 with first nonzero entry 1."""
    F = np.array(list(product(range(p), repeat=4))[1:], dtype=np.int64)
    lead = F[np.arange(F.shape[0]), np.argmax(F != 0, axis=1)]
    return F[lead == 1]


def grassmannian3(p: int) -> List[Subspace3]:
    """All 3-dimensional subspaces of (Z_p)^4, sorted by key."""
    _require_prime(p)
    return sorted((Subspace3.from_normal(p, f) for f in _dual_lines(p)), key=lambda s: s.key)


def smallest_nonresidue(p: int) -> Optional[int]:
    squares = {(a * a) % p for a in range(1, p)}
    return next((a for a in range(2, p) if a not in squares), None)


def named_representative(p: int, label: str, nonresidue: Optional[int] = None) -> Subspace3:
    """
    The named representative of an orbit. For p != 3 O5 uses the smallest
    non-residue unless another one is given; p = 2 has no O5.
    """
    if label not in LABELS:
        raise ValueError(f"unknown orbit label {label!r}")
    if p == 2 and label == "O5":
        raise LoopError("O5 undefined for p=2")

    xp, yp, xxy, xyy = np.eye(4, dtype=np.int64)
    if label == "O1":
        rows = [xp, xxy, xyy]
    elif label == "O2":
        rows = [xp, yp, xxy]
    elif p == 3:
        rows = {
            "O3": [xp + xyy, yp, xxy],
            "O4": [xp - xyy, yp, xxy],
            "O5": [xp - xyy, yp + xyy, xxy],
        }[label]
    elif label == "O3":
        rows = [xp, yp + xyy, xxy]
    elif label == "O4":
        rows = [yp, xp + xyy, xxy]
    else:
        lam = nonresidue if nonresidue is not None else smallest_nonresidue(p)
        rows = [yp, lam * xp + xyy, xxy]
    return Subspace3.from_rows(p, rows)


# --- Orbits ---

class UnionFind:
    def __init__(self, items):
        items = list(items)
        self.parent = {x: x for x in items}
        self.rank = {x: 0 for x in items}

    def find(self, x):
        y = self.parent[x]
        if self.parent[y] != y:
            y = self.parent[x] = self.find(y)
        return y

    def union(self, x, y):
        x, y = self.find(x), self.find(y)
        if x == y:
            return
        if self.rank[x] < self.rank[y]:
            x, y = y, x
        elif self.rank[x] == self.rank[y]:
            self.rank[x] += 1
        self.parent[y] = x

    def groups(self) -> Dict:
        out: Dict = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return out


def _orbit_groups(p: int) -> List[List[Subspace3]]:
    """Orbits of the Grassmannian, each sorted by key, ordered by their least key."""
    F = _dual_lines(p)
    ids = _line_index(p, F)
    uf = UnionFind(int(i) for i in ids)

    mats = gl2_enumerate(p) if p <= 7 else gl2_generators(p)
    logger.debug(f"Acting with {len(mats)} matrices on {len(F)} subspaces")
    debug = get_settings().debug
    for rho in mats:
        if debug and not np.array_equal(action_matrix(p, rho), induced_action_matrix(p, rho)):
            raise LoopError(f"action matrix of {tuple(rho)} disagrees with the induced automorphism")
        # (vM) . f' = 0 for all v in ker f  <=>  f' is proportional to M^-1 f
        M_inv = action_matrix(p, mat2_inverse(p, rho))
        images = _line_index(p, _normalize_lines(p, (F @ M_inv.T) % p))
        for a, b in zip(ids, images):
            uf.union(int(a), int(b))

    by_id = {int(i): Subspace3.from_normal(p, f) for i, f in zip(ids, F)}
    orbits = [sorted((by_id[i] for i in members), key=lambda s: s.key) for members in uf.groups().values()]
    return sorted(orbits, key=lambda orbit: orbit[0].key)


def compute_orbits(p: int) -> OrbitReport:
    """
    Partition grassmannian3(p) into GL2(p)-orbits and label them O1..O5.

    Raises UnlabeledOrbitError if an orbit contains no named representative.
    """
    _require_prime(p)
    logger.info(f"Computing GL2({p}) orbits on 3-dimensional subspaces")
    orbits = _orbit_groups(p)

    named = {label: named_representative(p, label) for label in labels_for(p)}
    entries = []
    for orbit in orbits:
        keys = [s.key for s in orbit]
        matches = [label for label, rep in named.items() if rep.key in keys]
        if len(matches) != 1:
            raise UnlabeledOrbitError(
                f"unlabeled orbit found: size {len(orbit)}, representative {keys[0]}, matches {matches}",
                witness=keys[0],
            )
        label = matches[0]
        entries.append(OrbitEntry(
            label=label,
            size=len(orbit),
            representative=keys[0],
            named_representative=named[label].key,
            members=keys,
        ))

    entries.sort(key=lambda e: e.label)
    total = p ** 3 + p ** 2 + p + 1
    logger.info(f"Found {len(entries)} orbits over {total} subspaces: {[e.size for e in entries]}")
    return OrbitReport(
        p=p,
        nonresidue=smallest_nonresidue(p) if p != 3 else None,
        total_subspaces=total,
        orbits=entries,
    )


# --- Quotients of F_p ---

class QuotientLoop(NamedTuple):
    loop: CayleyLoop
    subspace: Subspace3
    x: int
    y: int


def _coset_index(p: int, normal: np.ndarray, U) -> np.ndarray:
    """Coset of u in F_p/N: (a1, a2, f . central part)."""
    t = (normal[0] * U[2] + normal[1] * U[3] + normal[2] * U[4] + normal[3] * U[5]) % p
    return U[0] * p * p + U[1] * p + t


def quotient_loop(p: int, N: Subspace3, debug: Optional[bool] = None) -> QuotientLoop:
    """
    F_p / N of order p^3, built from fp_mul on coset representatives.

    Coset (a1, a2, t) has index a1 p^2 + a2 p + t and representative
    (a1, a2, t e_k) with k the first coordinate where the functional is 1.
    The images of x and y are the cosets with indices p^2 and p.
    """
    n = p ** 3
    f = np.array(N.normal, dtype=np.int64)
    k = int(np.argmax(f != 0))
    idx = np.arange(n)
    reps = np.zeros((6, n), dtype=np.int64)
    reps[0], reps[1] = idx // (p * p), (idx // p) % p
    reps[2 + k] = idx % p

    table = np.empty((n, n), dtype=np.int32)
    step = max(1, (1 << 20) // n)
    for start in range(0, n, step):
        prod = fp_mul_arrays(p, reps[:, start:start + step, None], reps[:, None, :])
        table[start:start + step] = _coset_index(p, f, prod)

    if debug is None:
        debug = get_settings().debug
    if debug:
        rng = np.random.default_rng(0)
        U = rng.integers(0, p, size=(6, 1000))
        V = rng.integers(0, p, size=(6, 1000))
        lhs = table[_coset_index(p, f, U), _coset_index(p, f, V)]
        if not np.array_equal(lhs, _coset_index(p, f, fp_mul_arrays(p, U, V))):
            raise LoopError(f"quotient by {N.key} is not well defined")

    return QuotientLoop(build_loop(table, order_cap=n), N, p * p, p)


# --- Homomorphisms out of F_p ---

@lru_cache(maxsize=64)
def variety_violation(Q: CayleyLoop, p: int) -> Optional[str]:
    """Why Q cannot receive the canonical-word homomorphism from F_p, or None."""
    if Q.order != p ** 3:
        return f"order {Q.order} is not {p ** 3}"
    if not is_commutative(Q):
        return "not commutative"
    orders = element_orders(Q)
    if np.any((p * p) % orders != 0):
        return f"exponent does not divide {p * p}"
    assoc = np.unique(np.concatenate([np.unique(associator_slice(Q, x)) for x in range(Q.order)]))
    if np.any(p % orders[assoc] != 0):
        return f"some associator has order not dividing {p}"
    if not center(Q).mask[assoc].all():
        return "some associator is not central"
    method = "identityA" if Q.order <= get_settings().exhaustive_limit else "inner"
    verdict = is_automorphic(Q, method=method)
    if not verdict.holds:
        return f"not automorphic, witness {verdict.witness}"
    return None


class _WordEvaluator:
    """Evaluates x^a1 y^a2 (x^p)^a3 (y^p)^a4 (x,x,y)^a5 (x,y,y)^a6 inside Q."""

    def __init__(self, Q: CayleyLoop, p: int):
        self.Q = Q
        self.p = p
        self.T = Q.table
        self.P = power_table(Q, p)
        self._slices: Dict[int, np.ndarray] = {}

    def generators(self, a: int, b: int) -> np.ndarray:
        if a not in self._slices:
            self._slices[a] = associator_slice(self.Q, a)
        A = self._slices[a]
        return np.array([a, b, self.P[self.p, a], self.P[self.p, b], A[a, b], A[b, b]], dtype=np.int64)

    def evaluate(self, gens: np.ndarray, coords: np.ndarray) -> np.ndarray:
        powers = self.P[:self.p][:, gens]  # powers[e, i] = gens[i]^e
        value = powers[coords[0], 0]
        for i in range(1, 6):
            value = self.T[value, powers[coords[i], i]]
        return value


@dataclass
class FreeHomomorphism:
    """The homomorphism F_p -> Q with x -> a and y -> b."""
    p: int
    a: int
    b: int
    images: np.ndarray  # images[fp index]
    target_order: int

    @property
    def surjective(self) -> bool:
        return len(np.unique(self.images)) == self.target_order

    @property
    def kernel_indices(self) -> np.ndarray:
        return np.nonzero(self.images == 0)[0]

    def kernel_contains(self, N: Subspace3) -> bool:
        central = N.elements()
        index = central @ (self.p ** np.arange(3, -1, -1))
        return bool(np.all(self.images[index] == 0))

    def kernel_subspace(self) -> Optional[Subspace3]:
        """The kernel as a subspace of Z(F_p), or None if it is not a central subspace of order p^3."""
        kernel = self.kernel_indices
        if len(kernel) != self.p ** 3 or np.any(kernel >= self.p ** 4):
            return None
        coords = fp_decode_arrays(self.p, kernel)[2:].T
        return Subspace3.from_rows(self.p, coords)


def hom_from_free(p: int, Q: CayleyLoop, a: int, b: int) -> FreeHomomorphism:
    """
    Evaluate the canonical-word map x -> a, y -> b on every element of F_p.

    Raises OutsideVarietyError unless Q is a commutative automorphic loop of
    order p^3 with exponent dividing p^2 and central associators of order dividing p.
    """
    if (reason := variety_violation(Q, p)) is not None:
        raise OutsideVarietyError(f"target outside variety: {reason}")
    ev = _WordEvaluator(Q, p)
    coords = fp_decode_arrays(p, np.arange(p ** 6))
    return FreeHomomorphism(p, a, b, ev.evaluate(ev.generators(a, b), coords), Q.order)


def scan_isomorphism_via_free(p: int, target: CayleyLoop, source_kernel: Subspace3) -> Tuple[Optional[Tuple[int, int]], int]:
    """
    Look for a, b in target such that x -> a, y -> b is onto with kernel N.

    Such a pair exists iff target is isomorphic to F_p / N. Returns the first pair
    (or None) and the number of pairs examined.
    """
    if (reason := variety_violation(target, p)) is not None:
        raise OutsideVarietyError(f"target outside variety: {reason}")
    ev = _WordEvaluator(target, p)
    n = target.order
    central = np.zeros((6, p ** 3), dtype=np.int64)
    central[2:] = source_kernel.elements().T
    everything = fp_decode_arrays(p, np.arange(p ** 6))

    examined = 0
    for a in range(n):
        for b in range(n):
            examined += 1
            gens = ev.generators(a, b)
            if np.any(ev.evaluate(gens, central) != 0):
                continue
            if len(np.unique(ev.evaluate(gens, everything))) == n:
                return (a, b), examined
    return None, examined


def iso_classes_via_free(p: int) -> List[List[str]]:
    """
    Group subspaces N1 ~ N2 whenever F_p/N1 has a generator pair whose
    homomorphism from F_p has kernel N2. Blocks are sorted like compute_orbits.
    """
    if p > 3:
        raise ValueError(f"iso_classes_via_free is limited to p <= 3, got {p}")
    subspaces = grassmannian3(p)
    uf = UnionFind(s.key for s in subspaces)
    coords = fp_decode_arrays(p, np.arange(p ** 6))

    for N in subspaces:
        Q = quotient_loop(p, N).loop
        ev = _WordEvaluator(Q, p)
        seen = set()
        for a in range(Q.order):
            for b in range(Q.order):
                images = ev.evaluate(ev.generators(a, b), coords)
                if len(np.unique(images)) != Q.order:
                    continue
                kernel = np.nonzero(images == 0)[0]
                fingerprint = kernel.tobytes()
                if fingerprint in seen:
                    continue
                seen.add(fingerprint)
                hom = FreeHomomorphism(p, a, b, images, Q.order)
                K = hom.kernel_subspace()
                if K is None:
                    logger.debug(f"Kernel of ({a},{b}) into F_{p}/{N.key} is not central")
                    continue
                uf.union(N.key, K.key)

    blocks = [sorted(members) for members in uf.groups().values()]
    return sorted(blocks, key=lambda block: block[0])


# --- Catalog ---

class OrbitQuotient(NamedTuple):
    label: str
    quotient: QuotientLoop
    two_generated: bool


def orbit_quotients(p: int) -> List[OrbitQuotient]:
    """The quotient by every labeled representative, with its two-generation check."""
    out = []
    for label in labels_for(p):
        q = quotient_loop(p, named_representative(p, label))
        generated = subloop_generated(q.loop, [q.x, q.y])
        out.append(OrbitQuotient(label, q, len(generated) == q.loop.order))
    return out


def _automorphic_method(p: int) -> str:
    return "identityA" if p <= 3 else "inner"


def _certify_free_loop(p: int, exhaustive: bool, seed: int, workers: int) -> Tuple[Optional[bool], int]:
    """Identity (A) on F_p itself when its table fits under the order cap."""
    if p ** 6 > get_settings().order_cap:
        return None, 0
    fp = fp_cayley(p).loop
    verdict = is_automorphic(fp, method="identityA", exhaustive=exhaustive or None, seed=seed, workers=workers)
    if not verdict.holds:
        raise CertificationError(f"F_{p}", "identity (A)", f"witness {verdict.witness}")
    return True, verdict.checked


def classify_p3(
    p: int,
    exhaustive: bool = False,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
) -> ClassificationReport:
    """
    Build and certify the seven commutative automorphic loops of order p^3.

    Every entry is re-validated, checked for commutativity and automorphy, and
    separated from every other entry. Any failure raises CertificationError.
    """
    from constructions.manager import ConstructionManager, catalog_plan

    _require_prime(p)
    settings = get_settings()
    if p > settings.max_prime:
        raise ValueError(f"p={p} exceeds the configured cap {settings.max_prime}")
    seed = settings.seed if seed is None else seed
    workers = workers or settings.workers

    logger.info(f"Classifying commutative automorphic loops of order {p ** 3}")
    orbit_report = compute_orbits(p)
    manager = ConstructionManager(p, catalog_plan(p))

    free_ok, free_checked = _certify_free_loop(p, exhaustive, seed, workers)
    if free_ok:
        logger.info(f"F_{p} satisfies identity (A) on {free_checked} quadruples")

    method = _automorphic_method(p)
    loops: Dict[str, CayleyLoop] = {}
    profiles: Dict[str, StructureProfile] = {}
    certificates: Dict[str, Certificates] = {}
    for name, construction in manager.constructions.items():
        loop = construction.loop()
        try:
            build_loop(loop.table)
        except LoopError as e:
            raise CertificationError(name, "axioms", str(e))
        if not loop.is_commutative:
            raise CertificationError(name, "commutative")
        verdict = is_automorphic(loop, method=method, workers=workers)
        if not verdict.holds:
            raise CertificationError(name, "automorphic", f"witness {verdict.witness}")

        two_generated = None
        if construction.is_quotient:
            two_generated = construction.two_generated()
            if not two_generated:
                raise CertificationError(name, "two-generated")
            if loop.is_associative != (construction.label == "O1"):
                raise CertificationError(name, "only-group", "associativity does not match the orbit")

        loops[name] = loop
        profiles[name] = structure_profile(loop)
        certificates[name] = Certificates(
            axioms=True, commutative=True, automorphic=True,
            automorphic_method=method, two_generated=two_generated,
        )
        logger.info(f"Certified {name}: order {loop.order}, nilpotency {profiles[name].nilpotency_class}")

    q1 = manager.orbit_quotient("O1")
    q1_result = is_isomorphic(q1.loop(), loops[f"Z{p}xZ{p * p}"])
    if not q1_result.isomorphic:
        raise CertificationError("Q1", "coincidence", f"not isomorphic to Z{p}xZ{p * p}: {q1_result.reason}")

    for first, second in combinations(loops, 2):
        witness = _separate(p, manager, first, second, loops, profiles)
        certificates[first].noniso_witnesses[second] = witness
        certificates[second].noniso_witnesses[first] = witness
        logger.debug(f"{first} vs {second}: {witness}")

    entries = []
    for name, construction in manager.constructions.items():
        entries.append(CatalogEntry(
            name=name,
            construction=construction.descriptor,
            cayley_table=format_table(loops[name].table),
            profile=profiles[name],
            certificates=certificates[name],
            coincides_with="Q1" if name == f"Z{p}xZ{p * p}" else None,
        ))

    logger.info(f"Catalog for p={p} certified")
    return ClassificationReport(
        p=p,
        orbit_sizes={o.label: o.size for o in orbit_report.orbits},
        entries=entries,
        certified=True,
        free_loop_automorphic=free_ok,
        free_loop_quadruples=free_checked,
    )


def _separate(p, manager, first, second, loops, profiles) -> str:
    """Evidence that two catalog entries are not isomorphic."""
    if p > 2 and (field := profile_difference(profiles[first], profiles[second])) is not None:
        return f"profile: {field} differs"

    a, b = manager.get(first), manager.get(second)
    if p > 2 and a.is_quotient and b.is_quotient:
        pair, examined = scan_isomorphism_via_free(p, loops[second], a.subspace)
        if pair is not None:
            raise CertificationError(first, "non-isomorphism", f"{second} is a quotient by the same kernel via {pair}")
        return f"free-loop scan: none of {examined} generator pairs of {second} has kernel {a.subspace.key}"

    result = is_isomorphic(loops[first], loops[second], profiles=(profiles[first], profiles[second]))
    if result.isomorphic:
        raise CertificationError(first, "non-isomorphism", f"isomorphic to {second}")
    if not result.nodes:
        return f"profile: {result.reason}"
    return f"backtracking: {result.reason} after {result.nodes} nodes"


def catalog_loop(p: int, which: str) -> CayleyLoop:
    """A single named catalog loop, without certification."""
    from constructions.manager import ConstructionManager, catalog_plan

    _require_prime(p)
    plan = catalog_plan(p)
    if which not in plan and which != "Q1":
        raise ValueError(f"unknown catalog entry {which!r}; choose from {', '.join(['Q1', *plan])}")
    manager = ConstructionManager(p, plan)
    if which == "Q1":
        return manager.orbit_quotient("O1").loop()
    return manager.get(which).loop()
