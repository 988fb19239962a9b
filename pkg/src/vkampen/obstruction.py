"""Deleted products, equivariant characteristic classes and the van Kampen obstruction."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np

from .complexes import (
    ChainComplex,
    CohomologyClass,
    SimplicialComplex,
    SimplicialMap,
    Verdict,
    bockstein,
    is_zero,
)
from .exactalg import IntMatrix, matmul, solve_linear, zeros

DEFAULT_SEED = 20240607


class InternalInconsistency(RuntimeError):
    """A lifting equation that must be solvable was not."""


class DegreeOutOfRange(ValueError):
    """Requested degree exceeds the dimension of the deleted product."""


class GenericityExhausted(RuntimeError):
    """No vertex placement in general position was found within the retry budget."""


# ---------------------------------------------------------------------------
# Deleted product


class EquivariantCellComplex:
    """Cells σ×τ of vertex-disjoint simplices, with the factor-swap involution.

    A cell is a pair of sorted vertex-position tuples.  The involution sends
    σ×τ to (-1)^(dim σ · dim τ) τ×σ.
    """

    def __init__(self, K: SimplicialComplex):
        self.K = K
        simplices = [s for level in K.simplices for s in level]
        by_dim: dict[int, list] = {}
        for s in simplices:
            ss = set(s)
            for t in simplices:
                if ss.isdisjoint(t):
                    by_dim.setdefault(len(s) + len(t) - 2, []).append((s, t))
        top = max(by_dim, default=-1)
        self.cells: list[list[tuple]] = [sorted(by_dim.get(d, []), key=lambda c: (len(c[0]), c[0], c[1]))
                                         for d in range(top + 1)]
        self.index: list[dict] = [{c: i for i, c in enumerate(level)} for level in self.cells]
        self._bd: dict = {}
        self._quot: dict = {}

    @property
    def top(self) -> int:
        return len(self.cells) - 1

    def count(self, d: int) -> int:
        return len(self.cells[d]) if 0 <= d <= self.top else 0

    def partner(self, d: int, i: int) -> tuple[int, int]:
        """t(cell i) = sign · cell j; returns (j, sign)."""
        s, t = self.cells[d][i]
        sign = -1 if ((len(s) - 1) * (len(t) - 1)) % 2 else 1
        return self.index[d][(t, s)], sign

    def faces(self, d: int, i: int) -> list[tuple[int, int]]:
        """Boundary of cell i as (face index, coefficient) pairs."""
        s, t = self.cells[d][i]
        p = len(s) - 1
        out = []
        if p > 0:
            for k in range(len(s)):
                out.append((self.index[d - 1][(s[:k] + s[k + 1:], t)], -1 if k % 2 else 1))
        if len(t) > 1:
            base = -1 if p % 2 else 1
            for k in range(len(t)):
                out.append((self.index[d - 1][(s, t[:k] + t[k + 1:])], base * (-1 if k % 2 else 1)))
        return out

    def boundary(self, d: int) -> np.ndarray:
        if d not in self._bd:
            out = zeros(self.count(d - 1), self.count(d))
            if 0 < d <= self.top:
                for i in range(self.count(d)):
                    for j, c in self.faces(d, i):
                        out[j, i] += c
            self._bd[d] = out
        return self._bd[d]

    def involution(self, d: int) -> np.ndarray:
        out = zeros(self.count(d), self.count(d))
        for i in range(self.count(d)):
            j, s = self.partner(d, i)
            out[j, i] = s
        return out

    def is_free(self) -> bool:
        return all(self.partner(d, i)[0] != i for d in range(self.top + 1) for i in range(self.count(d)))

    def check_involution(self) -> bool:
        """t² = id and t∂ = ∂t, exactly."""
        for d in range(self.top + 1):
            T = self.involution(d)
            if not np.array_equal(matmul(T, T), np.eye(self.count(d), dtype=object)):
                return False
            if d > 0:
                lhs = matmul(self.involution(d - 1), self.boundary(d))
                rhs = matmul(self.boundary(d), T)
                if not np.array_equal(lhs, rhs):
                    return False
        return True

    def check_d_squared(self) -> bool:
        return all(not np.any(matmul(self.boundary(d - 1), self.boundary(d)))
                   for d in range(2, self.top + 1))

    def is_rep(self, d: int, i: int) -> bool:
        return i < self.partner(d, i)[0]

    def reps(self, d: int) -> list[int]:
        return [i for i in range(self.count(d)) if self.is_rep(d, i)]

    def quotient(self, twist: int = 1, ring: str = "Z") -> ChainComplex:
        """C ⊗ Z_twist over the group ring: cells are orbit representatives.

        Its cochains are the equivariant cochains c with c(t x) = twist · c(x).
        """
        key = (twist, ring)
        if key in self._quot:
            return self._quot[key]
        reps = [self.reps(d) for d in range(self.top + 1)]
        pos = [{c: k for k, c in enumerate(r)} for r in reps]
        bds = [zeros(0, len(reps[0]) if reps else 0)]
        for d in range(1, self.top + 1):
            out = zeros(len(reps[d - 1]), len(reps[d]))
            for col, i in enumerate(reps[d]):
                for j, a in self.faces(d, i):
                    if j in pos[d - 1]:
                        out[pos[d - 1][j], col] += a
                    else:
                        r, s = self.partner(d - 1, j)
                        out[pos[d - 1][r], col] += a * s * twist
            bds.append(out)
        cells = [[self.label(d, i) for i in r] for d, r in enumerate(reps)]
        name = f"DP({self.K.name})/t"
        cx = ChainComplex(bds, cells, ring=ring, twist=twist if ring == "Z" else 1, name=name)
        self._quot[key] = cx
        return cx

    def rep_positions(self, d: int) -> dict[int, int]:
        return {c: k for k, c in enumerate(self.reps(d))}

    def label(self, d: int, i: int) -> tuple:
        s, t = self.cells[d][i]
        return (self.K.labels(s), self.K.labels(t))

    def __repr__(self) -> str:
        return f"EquivariantCellComplex({self.K.name}, cells={[len(c) for c in self.cells]})"


def deleted_product(K: SimplicialComplex) -> EquivariantCellComplex:
    return EquivariantCellComplex(K)


# ---------------------------------------------------------------------------
# Equivariant chain map to the standard free resolution


@dataclass
class ResolutionChainMap:
    """Equivariant chain map to the free resolution W of the two-element group.

    W_k is free on e_k with ∂e_k = (1 + (-1)^k t) e_{k-1}.  ``values[d][i]``
    is the pair (a, b) with f(cell i) = a·e_d + b·t e_d; values on
    non-representative cells are determined by equivariance.
    """

    dp: EquivariantCellComplex
    values: list

    def matrix(self, d: int) -> np.ndarray:
        """2 x cells matrix: rows are the e_d and t e_d coefficients."""
        out = zeros(2, self.dp.count(d))
        for i, (a, b) in enumerate(self.values[d]):
            out[0, i], out[1, i] = a, b
        return out

    def verify(self) -> bool:
        """Commutes with ∂ and with t exactly."""
        dp = self.dp
        for d in range(dp.top + 1):
            F = self.matrix(d)
            swap = np.array([[0, 1], [1, 0]], dtype=object)
            if not np.array_equal(matmul(F, dp.involution(d)), matmul(swap, F)):
                return False
            if d > 0:
                sg = -1 if d % 2 else 1
                W = np.array([[1, sg], [sg, 1]], dtype=object)
                if not np.array_equal(matmul(W, F), matmul(self.matrix(d - 1), dp.boundary(d))):
                    return False
        return True


def classify(dp: EquivariantCellComplex, rng: random.Random | None = None) -> ResolutionChainMap:
    """Build the classifying chain map degree by degree.

    With ``rng`` the construction makes random admissible choices (used to
    test that pullback classes do not depend on the choices).
    """
    values: list[list] = []
    for d in range(dp.top + 1):
        level: list = [None] * dp.count(d)
        sg = -1 if d % 2 else 1
        W = np.array([[1, sg], [sg, 1]], dtype=object)
        for i in dp.reps(d):
            if d == 0:
                val = (1, 0) if rng is None or rng.random() < 0.5 else (0, 1)
            else:
                A = B = 0
                for j, c in dp.faces(d, i):
                    a, b = values[d - 1][j]
                    A += c * a
                    B += c * b
                sol = solve_linear(W, (A, B))
                if sol is None:
                    raise InternalInconsistency(f"cannot lift degree-{d} cell {dp.label(d, i)}")
                val = tuple(sol.particular)
                if rng is not None:
                    lam = rng.randint(-3, 3)
                    val = (val[0] - sg * lam, val[1] + lam)
            level[i] = val
            j, s = dp.partner(d, i)
            level[j] = (s * val[1], s * val[0])
        values.append(level)
    return ResolutionChainMap(dp, values)


# ---------------------------------------------------------------------------
# Characteristic classes


def _twist(m: int) -> int:
    return -1 if m % 2 else 1


def char_class(dp: EquivariantCellComplex, m: int, ring: str = "Z", fmap: ResolutionChainMap | None = None) -> CohomologyClass:
    """Pullback of the canonical degree-m class: e^m over Z (twist (-1)^m) or w₁^m over Z/2."""
    if m < 0 or m > dp.top:
        raise DegreeOutOfRange(f"degree {m} exceeds the deleted product dimension {dp.top}")
    fmap = fmap or classify(dp)
    if ring == "Z":
        eps = _twist(m)
        cx = dp.quotient(eps, "Z")
        rep = [fmap.values[m][i][0] + eps * fmap.values[m][i][1] for i in dp.reps(m)]
        return CohomologyClass(cx, m, tuple(rep), label=f"e^{m}")
    cx = dp.quotient(1, "Z2")
    rep = [(fmap.values[m][i][0] + fmap.values[m][i][1]) % 2 for i in dp.reps(m)]
    return CohomologyClass(cx, m, tuple(rep), label=f"w1^{m}")


def zero_class(dp: EquivariantCellComplex, m: int, ring: str = "Z") -> CohomologyClass:
    cx = dp.quotient(_twist(m) if ring == "Z" else 1, ring)
    return CohomologyClass(cx, m, tuple([0] * cx.dim(m)), label="0")


def char_class_or_zero(dp: EquivariantCellComplex, m: int, ring: str = "Z") -> tuple[CohomologyClass, bool]:
    """The class, plus whether it is zero for dimension reasons."""
    try:
        return char_class(dp, m, ring), False
    except DegreeOutOfRange:
        return zero_class(dp, m, ring), True


def bockstein_route(dp: EquivariantCellComplex, m: int) -> CohomologyClass:
    """β(w₁^{m-1}) computed in the twisted integral complex of degree m."""
    w = char_class(dp, m - 1, "Z2")
    return bockstein(w, integral=dp.quotient(_twist(m), "Z"))


def lift_of_w(dp: EquivariantCellComplex, m: int, fmap: ResolutionChainMap | None = None) -> tuple[int, ...]:
    """Integral lift a + (-1)^m b of w₁^{m-1}; its coboundary is exactly 2e^m."""
    fmap = fmap or classify(dp)
    eps = _twist(m)
    return tuple(fmap.values[m - 1][i][0] + eps * fmap.values[m - 1][i][1] for i in dp.reps(m - 1))


# ---------------------------------------------------------------------------
# Geometric van Kampen cocycle


@dataclass
class Placement:
    coords: dict  # vertex position -> tuple of ints
    seed: int
    attempt: int


def _det(rows: list[list]) -> Fraction:
    a = [[Fraction(x) for x in r] for r in rows]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            if a[r][c]:
                f = a[r][c] / a[c][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return det


def _affinely_independent(points: Sequence[Sequence[int]]) -> bool:
    if len(points) <= 1:
        return True
    base = points[0]
    rows = [[x - y for x, y in zip(p, base)] for p in points[1:]]
    # rank check via Gram determinant
    gram = [[sum(x * y for x, y in zip(r, s)) for s in rows] for r in rows]
    return _det(gram) != 0


def _solve_fraction(M: list[list[int]], b: list[int]) -> list[Fraction] | None:
    n = len(M)
    a = [[Fraction(x) for x in row] + [Fraction(v)] for row, v in zip(M, b)]
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            return None
        a[c], a[p] = a[p], a[c]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c] / a[c][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [a[r][n] / a[r][r] for r in range(n)]


def general_position_placement(K: SimplicialComplex, n: int, seed: int = DEFAULT_SEED, budget: int = 50,
                               scale: int = 1000) -> Placement:
    """Seeded integer vertex coordinates in R^{2n}, verified in general position."""
    dim = 2 * n
    rng = random.Random(seed)
    verts = range(len(K.vertices))
    tops = K.simplices[n] if n <= K.dim else []
    for attempt in range(budget):
        coords = {v: tuple(rng.randint(-scale, scale) for _ in range(dim)) for v in verts}
        ok = True
        for size in range(2, min(dim + 1, len(K.vertices)) + 1):
            for sub in combinations(verts, size):
                if not _affinely_independent([coords[v] for v in sub]):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            for s, t in combinations(tops, 2):
                if set(s).isdisjoint(t) and _edge_det(coords, s, t) == 0:
                    ok = False
                    break
        if ok:
            return Placement(coords, seed, attempt)
    raise GenericityExhausted(f"no general-position placement after {budget} draws")


def _edge_det(coords, s, t) -> Fraction:
    cols = [[a - b for a, b in zip(coords[v], coords[s[0]])] for v in s[1:]]
    cols += [[a - b for a, b in zip(coords[w], coords[t[0]])] for w in t[1:]]
    return _det([list(r) for r in zip(*cols)])


def intersection_sign(coords, s, t) -> int:
    """Signed intersection of two disjoint n-simplices in R^{2n} (0 if disjoint)."""
    dim = len(coords[s[0]])
    M = []
    for k in range(dim):
        M.append([coords[v][k] for v in s] + [-coords[w][k] for w in t])
    M.append([1] * len(s) + [0] * len(t))
    M.append([0] * len(s) + [1] * len(t))
    rhs = [0] * dim + [1, 1]
    sol = _solve_fraction(M, rhs)
    if sol is None:
        raise GenericityExhausted("singular intersection system")
    if any(x == 0 for x in sol):
        raise GenericityExhausted("intersection on a proper face")
    if any(x < 0 for x in sol):
        return 0
    det = _edge_det(coords, s, t)
    return 1 if det > 0 else -1


def vk_class_geometric(K: SimplicialComplex, n: int, seed: int = DEFAULT_SEED,
                       dp: EquivariantCellComplex | None = None) -> CohomologyClass:
    """Degree-2n cocycle counting signed double points of a generic linear map to R^{2n}."""
    if K.dim > n:
        raise ValueError("complex dimension exceeds n")
    dp = dp or deleted_product(K)
    m = 2 * n
    if m > dp.top:
        return zero_class(dp, m)
    place = general_position_placement(K, n, seed)
    cx = dp.quotient(_twist(m), "Z")
    full = []
    for i, (s, t) in enumerate(dp.cells[m]):
        full.append(intersection_sign(place.coords, s, t) if len(s) == len(t) == n + 1 else 0)
    for i in range(dp.count(m)):
        j, sgn = dp.partner(m, i)
        if full[j] != sgn * full[i]:
            raise InternalInconsistency("geometric cocycle is not equivariant")
    rep = tuple(full[i] for i in dp.reps(m))
    return CohomologyClass(cx, m, rep, label=f"vk-geometric(seed={seed})")


def classes_equal_up_to_sign(a: CohomologyClass, b: CohomologyClass, sign: int) -> bool:
    return is_zero(a - b.scaled(sign)).zero


def calibrate_sign(seed: int = DEFAULT_SEED) -> int:
    """Global sign s with geometric = s · e^{2n}, fixed on K_5."""
    from .complexes import complete_graph

    K5 = complete_graph(5)
    dp = deleted_product(K5)
    geo = vk_class_geometric(K5, 1, seed, dp)
    e2 = char_class(dp, 2)
    for s in (1, -1):
        if classes_equal_up_to_sign(geo, e2, s):
            return s
    raise InternalInconsistency("geometric and resolution classes disagree on K_5")


# ---------------------------------------------------------------------------
# Verdicts, co-index, restriction


def coindex(K: SimplicialComplex, dp: EquivariantCellComplex | None = None) -> int:
    """Largest m with e^m nonzero; -1 for an empty deleted product."""
    dp = dp or deleted_product(K)
    fmap = classify(dp)
    best = -1
    for m in range(dp.top + 1):
        if not is_zero(char_class(dp, m, fmap=fmap)).zero:
            best = m
    return best


def characteristic_profile(K: SimplicialComplex) -> list[bool]:
    """Nonvanishing of e^m for m = 0..dim of the deleted product."""
    dp = deleted_product(K)
    fmap = classify(dp)
    return [not is_zero(char_class(dp, m, fmap=fmap)).zero for m in range(dp.top + 1)]


def sigma_subcomplex(dp: EquivariantCellComplex, p: SimplicialMap) -> tuple[list[list[int]], list[list[int]]]:
    """Split the cells by whether the p-images of the two factors share a vertex.

    Returns (sigma, complement) as per-degree lists of cell indices.  The
    complement (images vertex-disjoint) is closed under faces and under t.
    """
    if p.source is not dp.K and p.source.vertices != dp.K.vertices:
        raise ValueError("map source is not the complex of the deleted product")
    sig, comp = [], []
    for d in range(dp.top + 1):
        a, b = [], []
        for i, (s, t) in enumerate(dp.cells[d]):
            (a if p.image_positions(s) & p.image_positions(t) else b).append(i)
        sig.append(a)
        comp.append(b)
    return sig, comp


def restricted_vanishing(klass: CohomologyClass, dp: EquivariantCellComplex, complement: list[list[int]]) -> Verdict:
    """Verdict for the restriction of a quotient class to the complement of Σ."""
    keep = []
    for d in range(dp.top + 1):
        pos = dp.rep_positions(d)
        cset = set(complement[d]) if d < len(complement) else set()
        keep.append(sorted(pos[i] for i in cset if i in pos))
    sub = klass.complex.submatrix_complex(keep, name=f"{klass.complex.name}|complement")
    d = klass.degree
    rep = tuple(klass.representative[i] for i in keep[d]) if d < len(keep) else ()
    if d >= len(sub.cells):
        sub = ChainComplex(list(sub.boundaries) + [zeros(sub.dim(k - 1), 0) for k in range(len(sub.cells), d + 1)],
                           list(sub.cells) + [[] for _ in range(len(sub.cells), d + 1)],
                           ring=sub.ring, twist=sub.twist, name=sub.name)
    return is_zero(CohomologyClass(sub, d, rep, label=f"{klass.label}|complement"))


# ---------------------------------------------------------------------------
# Reports


@dataclass
class ObstructionReport:
    complex: str
    m: int
    klass: CohomologyClass
    verdict: Verdict
    route: list
    completeness_label: str
    hypotheses: dict
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        w = self.verdict.to_json()
        return {
            "complex": self.complex,
            "m": self.m,
            "verdict": w["verdict"],
            "route": list(self.route),
            "witness": w["witness"],
            "witness_verified": w["verified"],
            "class": self.klass.to_json(),
            "completeness_label": self.completeness_label,
            "hypotheses": self.hypotheses,
            "notes": list(self.notes),
        }


def dimension_range(n: int, m: int) -> str:
    if m == 2 * n:
        return "double"
    if 2 * m > 3 * (n + 1):
        return "metastable"
    return "outside"


def completeness_label(n: int, m: int) -> str:
    if m >= 2 * n + 1:
        return "complete"
    if m == 2 * n and n > 2:
        return "complete"
    return "necessary-only"


def embeddability_report(K: SimplicialComplex, m: int, seed: int = DEFAULT_SEED, name: str = "",
                         cross_check: bool = True) -> ObstructionReport:
    """Obstruction e^m of the deleted product, with every applicable route cross-checked."""
    n = max(K.dim, 0)
    dp = deleted_product(K)
    klass, trivial = char_class_or_zero(dp, m)
    verdict = is_zero(klass)
    route = ["resolution-pullback"]
    notes = []
    if trivial:
        notes.append(f"degree {m} exceeds the deleted product dimension {dp.top}; the class vanishes for dimension reasons")
    if cross_check and not trivial:
        if m >= 1:
            beta = bockstein_route(dp, m)
            if not is_zero(klass - beta).zero:
                raise InternalInconsistency("Bockstein route disagrees with the resolution pullback")
            route.append("bockstein")
        if m == 2 * n and n >= 1 and len(K.vertices) <= 16:
            geo = vk_class_geometric(K, n, seed, dp)
            if not (is_zero(geo - klass).zero or is_zero(geo + klass).zero):
                raise InternalInconsistency("geometric cocycle disagrees with the resolution pullback")
            route.append("geometric-cocycle")
    label = completeness_label(n, m)
    if label == "necessary-only":
        notes.append("vanishing is a necessary condition for embeddability in this dimension range")
    elif m == 2 * n and n == 3:
        notes.append("complete for finite complexes; for general 3-dimensional compacta completeness is open")
    return ObstructionReport(name or K.name or "K", m, klass, verdict, route, label,
                             {"n": n, "range": dimension_range(n, m)}, notes)
