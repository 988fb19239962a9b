"""Exact integer linear algebra.

Everything here works over the integers with unbounded precision.  Matrices
are numpy arrays of ``dtype=object`` holding Python ints; the Smith normal
form routine runs on int64 while the entries provably fit and promotes the
whole working set to Python ints before any operation that could overflow,
so the results never depend on the machine word size.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "IntMatrix",
    "as_int_array",
    "SmithDecomposition",
    "snf",
    "Solution",
    "solve_linear",
    "separating_functional",
    "kernel_basis",
    "Sublattice",
    "image",
    "membership",
    "FgAbGroup",
    "GroupHom",
    "IllDefined",
    "cokernel",
    "compose",
    "induced_on_quotients",
    "subquotient",
    "gf2_rref",
    "gf2_solve",
    "gf2_rank",
    "gf2_kernel",
    "check_functional",
    "vector_gcd",
    "det",
    "matmul",
    "identity",
    "zeros",
]

# Bound on intermediate magnitudes while working in int64.
_LIMIT = 1 << 62


def as_int_array(x, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Return ``x`` as a 2-D object array of Python ints (copied)."""
    if isinstance(x, IntMatrix):
        return x.a.copy()
    arr = np.array(x, dtype=object)
    if shape is not None:
        arr = arr.reshape(shape)
    if arr.ndim == 1 and shape is None:
        arr = arr.reshape(1, -1) if arr.size else arr.reshape(0, 0)
    out = np.empty(arr.shape, dtype=object)
    flat_in = arr.ravel()
    flat_out = out.ravel()
    for i, v in enumerate(flat_in):
        flat_out[i] = int(v)
    return out


def _vec(x) -> np.ndarray:
    arr = np.array(x, dtype=object).ravel()
    out = np.empty(arr.shape, dtype=object)
    for i, v in enumerate(arr):
        out[i] = int(v)
    return out


def zeros(rows: int, cols: int) -> np.ndarray:
    out = np.empty((rows, cols), dtype=object)
    out.fill(0)
    return out


def identity(n: int) -> np.ndarray:
    out = zeros(n, n)
    for i in range(n):
        out[i, i] = 1
    return out


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact product of two object matrices (handles empty shapes)."""
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
    if a.shape[1] == 0:
        return zeros(a.shape[0], b.shape[1])
    return np.asarray(a.dot(b), dtype=object)


class IntMatrix:
    """Immutable integer matrix with arbitrary-precision entries."""

    __slots__ = ("a",)

    def __init__(self, entries, rows: int | None = None, cols: int | None = None):
        if isinstance(entries, IntMatrix):
            arr = entries.a.copy()
        elif rows is not None and cols is not None:
            arr = as_int_array(list(entries) if not isinstance(entries, np.ndarray) else entries, (rows, cols))
        else:
            arr = as_int_array(entries)
        if arr.ndim != 2:
            raise ValueError("IntMatrix needs a 2-D shape")
        arr.flags.writeable = False
        self.a = arr

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    @property
    def entries(self) -> list[list[int]]:
        return [[int(v) for v in row] for row in self.a]

    def __getitem__(self, idx):
        return self.a[idx]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix(matmul(self.a, as_int_array(other)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.all(self.a == other.a))

    def __hash__(self) -> int:
        return hash((self.shape, tuple(self.a.ravel().tolist())))

    def __repr__(self) -> str:
        return f"IntMatrix({self.entries})"

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(self.a.T.copy())

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(identity(n))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(zeros(rows, cols))

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[str(v) for v in row] for row in self.entries],
        }

    @classmethod
    def from_json(cls, obj) -> "IntMatrix":
        if isinstance(obj, str):
            obj = json.loads(obj)
        rows, cols = int(obj["rows"]), int(obj["cols"])
        entries = obj["entries"]
        if len(entries) != rows or any(len(r) != cols for r in entries):
            raise ValueError(f"matrix entries do not match declared shape {rows}x{cols}")
        flat = [int(v) for row in entries for v in row]
        return cls(flat, rows, cols)


# ---------------------------------------------------------------------------
# Smith normal form


class _Work:
    """Matrix plus tracked unimodular transforms, with int64 -> object promotion."""

    def __init__(self, m: np.ndarray):
        n_rows, n_cols = m.shape
        big = max((abs(int(v)) for v in m.ravel()), default=0)
        self.small = big < (1 << 31) and max(n_rows, n_cols) < (1 << 20)
        dt = np.int64 if self.small else object
        self.M = np.array(m, dtype=dt)
        self.U = np.array(identity(n_rows), dtype=dt)
        self.Ui = np.array(identity(n_rows), dtype=dt)
        self.V = np.array(identity(n_cols), dtype=dt)
        self.Vi = np.array(identity(n_cols), dtype=dt)

    def _promote(self) -> None:
        if not self.small:
            return
        self.small = False
        for name in ("M", "U", "Ui", "V", "Vi"):
            arr = getattr(self, name)
            setattr(self, name, np.array([[int(v) for v in row] for row in arr], dtype=object).reshape(arr.shape))

    @staticmethod
    def _maxabs(arr) -> int:
        if arr.size == 0:
            return 0
        return max(int(arr.max()), -int(arr.min()))

    def _guard(self, q, *triples) -> None:
        # (target, source, terms): promote if target + terms*q*source may overflow
        if not self.small:
            return
        qa = max((abs(int(v)) for v in q), default=0)
        for tgt, src, terms in triples:
            if self._maxabs(tgt) + terms * qa * self._maxabs(src) >= _LIMIT:
                self._promote()
                return

    def swap_rows(self, a: int, b: int) -> None:
        if a == b:
            return
        self.M[[a, b]] = self.M[[b, a]]
        self.U[[a, b]] = self.U[[b, a]]
        self.Ui[:, [a, b]] = self.Ui[:, [b, a]]

    def swap_cols(self, a: int, b: int) -> None:
        if a == b:
            return
        self.M[:, [a, b]] = self.M[:, [b, a]]
        self.V[:, [a, b]] = self.V[:, [b, a]]
        self.Vi[[a, b]] = self.Vi[[b, a]]

    def neg_row(self, a: int) -> None:
        self.M[a] = -self.M[a]
        self.U[a] = -self.U[a]
        self.Ui[:, a] = -self.Ui[:, a]

    def add_rows(self, targets: np.ndarray, src: int, q: np.ndarray) -> None:
        """row_t += q_t * row_src for every t in targets."""
        self._guard(q, (self.M[targets], self.M[src], 1), (self.U[targets], self.U[src], 1),
                    (self.Ui[:, src], self.Ui[:, targets], len(targets)))
        if self.small:
            q = np.asarray(q, dtype=np.int64)
        else:
            q = np.array([int(v) for v in q], dtype=object)
        self.M[targets] += np.outer(q, self.M[src])
        self.U[targets] += np.outer(q, self.U[src])
        self.Ui[:, src] -= self.Ui[:, targets].dot(q)

    def add_cols(self, targets: np.ndarray, src: int, q: np.ndarray) -> None:
        """col_t += q_t * col_src for every t in targets."""
        self._guard(q, (self.M[:, targets], self.M[:, src], 1), (self.V[:, targets], self.V[:, src], 1),
                    (self.Vi[src], self.Vi[targets], len(targets)))
        if self.small:
            q = np.asarray(q, dtype=np.int64)
        else:
            q = np.array([int(v) for v in q], dtype=object)
        self.M[:, targets] += np.outer(self.M[:, src], q)
        self.V[:, targets] += np.outer(self.V[:, src], q)
        self.Vi[src] -= q.dot(self.Vi[targets])

    def pivot(self, k: int):
        sub = self.M[k:, k:]
        if sub.size == 0:
            return None
        a = np.abs(sub)
        nz = a != 0
        if not nz.any():
            return None
        if self.small:
            big = np.iinfo(np.int64).max
            masked = np.where(nz, a, big)
            flat = int(np.argmin(masked))
        else:
            best = a[nz].min()
            flat = int(np.flatnonzero((a == best) & nz)[0])
        i, j = divmod(flat, sub.shape[1])
        return k + i, k + j


def _as_obj(arr: np.ndarray) -> np.ndarray:
    out = zeros(*arr.shape)
    for idx, v in np.ndenumerate(arr):
        out[idx] = int(v)
    return out


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ M @ V == D`` with ``D`` diagonal and d_1 | d_2 | ... ."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    invariant_factors: tuple[int, ...]
    U_inv: IntMatrix = field(repr=False)
    V_inv: IntMatrix = field(repr=False)

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    def verify(self, M) -> bool:
        m = as_int_array(M)
        U, D, V = self.U.a, self.D.a, self.V.a
        if not np.array_equal(matmul(matmul(U, m), V), D):
            return False
        if not np.array_equal(matmul(U, self.U_inv.a), identity(U.shape[0])):
            return False
        if not np.array_equal(matmul(V, self.V_inv.a), identity(V.shape[0])):
            return False
        diag = [D[i, i] for i in range(min(D.shape))]
        off = D.copy()
        for i in range(min(D.shape)):
            off[i, i] = 0
        if any(v != 0 for v in off.ravel()):
            return False
        r = self.rank
        if any(d <= 0 for d in diag[:r]) or any(d != 0 for d in diag[r:]):
            return False
        return all(diag[i + 1] % diag[i] == 0 for i in range(r - 1))


def snf(M) -> SmithDecomposition:
    """Smith normal form with unimodular witnesses.

    Pivot rule: smallest nonzero absolute value in the remaining block, ties
    broken by lowest row then lowest column.  The result is a deterministic
    function of the input.
    """
    m = as_int_array(M)
    if m.ndim != 2:
        raise ValueError("snf expects a matrix")
    w = _Work(m)
    n_rows, n_cols = m.shape
    k = 0
    while k < min(n_rows, n_cols):
        pos = w.pivot(k)
        if pos is None:
            break
        i, j = pos
        w.swap_rows(k, i)
        w.swap_cols(k, j)
        p = w.M[k, k]
        col = w.M[k + 1:, k]
        rows = np.nonzero(col)[0] + k + 1
        if rows.size:
            q = np.array([int(v) // int(p) for v in w.M[rows, k]], dtype=object)
            w.add_rows(rows, k, -q)
            if np.any(w.M[k + 1:, k] != 0):
                continue
        row = w.M[k, k + 1:]
        cols = np.nonzero(row)[0] + k + 1
        if cols.size:
            q = np.array([int(v) // int(p) for v in w.M[k, cols]], dtype=object)
            w.add_cols(cols, k, -q)
            if np.any(w.M[k, k + 1:] != 0):
                continue
        rest = w.M[k + 1:, k + 1:]
        if rest.size:
            bad = np.nonzero(rest % p)
            if bad[0].size:
                w.add_rows(np.array([k]), k + 1 + int(bad[0][0]), np.array([1]))
                continue
        if w.M[k, k] < 0:
            w.neg_row(k)
        k += 1
    D = _as_obj(w.M)
    factors = tuple(int(D[i, i]) for i in range(min(n_rows, n_cols)) if D[i, i] != 0)
    return SmithDecomposition(
        U=IntMatrix(_as_obj(w.U)),
        D=IntMatrix(D),
        V=IntMatrix(_as_obj(w.V)),
        invariant_factors=factors,
        U_inv=IntMatrix(_as_obj(w.Ui)),
        V_inv=IntMatrix(_as_obj(w.Vi)),
    )


# ---------------------------------------------------------------------------
# Linear systems


@dataclass(frozen=True)
class Solution:
    particular: tuple[int, ...]
    kernel: tuple[tuple[int, ...], ...]


def _decomp(M, dec: SmithDecomposition | None) -> SmithDecomposition:
    return dec if dec is not None else snf(M)


def solve_linear(M, b: Sequence[int], dec: SmithDecomposition | None = None) -> Solution | None:
    """Solve ``M x = b`` over the integers.

    Returns ``None`` when ``b`` is not in the integer column span of ``M``.
    The kernel basis spans all integer solutions of ``M x = 0``.
    """
    m = as_int_array(M)
    b = _vec(b)
    if b.shape[0] != m.shape[0]:
        raise ValueError(f"rhs length {b.shape[0]} does not match {m.shape[0]} rows")
    dec = _decomp(m, dec)
    r = dec.rank
    y = dec.U.a.dot(b) if m.shape[0] else b
    z = zeros(m.shape[1], 1).ravel()
    for i, d in enumerate(dec.invariant_factors):
        if y[i] % d:
            return None
        z[i] = y[i] // d
    if any(v != 0 for v in y[r:]):
        return None
    x = dec.V.a.dot(z) if m.shape[1] else z
    kern = tuple(tuple(int(v) for v in dec.V.a[:, j]) for j in range(r, m.shape[1]))
    return Solution(tuple(int(v) for v in x), kern)


def kernel_basis(M, dec: SmithDecomposition | None = None) -> np.ndarray:
    """Columns spanning the integer kernel of ``M`` (a saturated lattice)."""
    m = as_int_array(M)
    dec = _decomp(m, dec)
    return dec.V.a[:, dec.rank:].copy()


def separating_functional(M, b: Sequence[int], dec: SmithDecomposition | None = None):
    """Witness that ``b`` is not in the column span of ``M``.

    Returns ``(f, d)``: an integer row vector with ``f @ M == 0 (mod d)`` and
    ``f @ b != 0 (mod d)``, where ``d == 0`` means reduction into Z.  Returns
    ``None`` if ``b`` is in the span.  Torsion witnesses are preferred.
    """
    m = as_int_array(M)
    b = _vec(b)
    dec = _decomp(m, dec)
    y = dec.U.a.dot(b) if m.shape[0] else b
    for i, d in enumerate(dec.invariant_factors):
        if y[i] % d:
            return tuple(int(v) for v in dec.U.a[i]), int(d)
    for i in range(dec.rank, m.shape[0]):
        if y[i] != 0:
            return tuple(int(v) for v in dec.U.a[i]), 0
    return None


def check_functional(M, b, f, d: int) -> bool:
    m = as_int_array(M)
    f = _vec(f)
    fb = int(f.dot(_vec(b))) if len(f) else 0
    fm = f.dot(m) if m.shape[0] else zeros(1, m.shape[1]).ravel()
    if d == 0:
        return all(v == 0 for v in fm) and fb != 0
    return all(v % d == 0 for v in fm) and fb % d != 0


# ---------------------------------------------------------------------------
# Sublattices


@dataclass(frozen=True)
class Sublattice:
    """Sublattice of Z^n given by a basis (columns of ``basis``)."""

    ambient: int
    basis: IntMatrix

    @property
    def rank(self) -> int:
        return self.basis.cols

    def contains(self, v) -> bool:
        return membership(self, v)

    def contains_lattice(self, other: "Sublattice") -> bool:
        return all(membership(self, other.basis.a[:, j]) for j in range(other.rank))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Sublattice):
            return NotImplemented
        return (self.ambient == other.ambient and self.rank == other.rank
                and self.contains_lattice(other) and other.contains_lattice(self))

    def __hash__(self) -> int:
        return hash((self.ambient, self.rank))

    def coordinates(self, v) -> tuple[int, ...] | None:
        sol = solve_linear(self.basis, v)
        return None if sol is None else sol.particular

    def index_in(self, bigger: "Sublattice") -> int | None:
        """[bigger : self] if finite, else None.  Requires self <= bigger."""
        if self.rank != bigger.rank:
            return None
        if self.rank == 0:
            return 1
        coords = zeros(bigger.rank, self.rank)
        for j in range(self.rank):
            c = bigger.coordinates(self.basis.a[:, j])
            if c is None:
                raise ValueError("lattice is not contained in the larger one")
            coords[:, j] = c
        out = 1
        for d in snf(coords).invariant_factors:
            out *= d
        return out


def image(M) -> Sublattice:
    """Basis of the column span of ``M``."""
    m = as_int_array(M)
    dec = snf(m)
    r = dec.rank
    basis = zeros(m.shape[0], r)
    for i, d in enumerate(dec.invariant_factors):
        basis[:, i] = dec.U_inv.a[:, i] * d
    return Sublattice(m.shape[0], IntMatrix(basis))


def membership(lattice: Sublattice, v) -> bool:
    return solve_linear(lattice.basis, v) is not None


# ---------------------------------------------------------------------------
# Finitely generated abelian groups


class IllDefined(ValueError):
    """A matrix does not respect the relations of the groups involved."""


@dataclass(frozen=True)
class FgAbGroup:
    """Z/d_1 + ... + Z/d_t + Z^r in canonical form (torsion first).

    When built from a presentation Z^n / im(R), ``to_canonical`` (k x n) maps
    presentation coordinates to canonical coordinates and ``from_canonical``
    (n x k) maps canonical generators back.
    """

    free_rank: int
    torsion: tuple[int, ...] = ()
    relations: IntMatrix | None = field(default=None, compare=False, repr=False)
    to_canonical: IntMatrix | None = field(default=None, compare=False, repr=False)
    from_canonical: IntMatrix | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        t = tuple(int(d) for d in self.torsion)
        if any(d < 2 for d in t):
            raise ValueError("torsion coefficients must be >= 2")
        if any(t[i + 1] % t[i] for i in range(len(t) - 1)):
            raise ValueError("torsion coefficients must form a divisibility chain")
        object.__setattr__(self, "torsion", t)

    @property
    def ngens(self) -> int:
        return len(self.torsion) + self.free_rank

    @property
    def moduli(self) -> tuple[int, ...]:
        """Order of each canonical generator, 0 for free generators."""
        return self.torsion + (0,) * self.free_rank

    @property
    def is_trivial(self) -> bool:
        return self.ngens == 0

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def order(self) -> int | None:
        if self.free_rank:
            return None
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def reduce(self, v) -> tuple[int, ...]:
        v = _vec(v)
        return tuple(int(x % d) if d else int(x) for x, d in zip(v, self.moduli))

    def is_zero_element(self, v) -> bool:
        return all(x == 0 for x in self.reduce(v))

    def relation_matrix(self) -> np.ndarray:
        """Diagonal relations of the canonical form (ngens x len(torsion))."""
        out = zeros(self.ngens, len(self.torsion))
        for i, d in enumerate(self.torsion):
            out[i, i] = d
        return out

    def same_type(self, other: "FgAbGroup") -> bool:
        return self.free_rank == other.free_rank and self.torsion == other.torsion

    def describe(self) -> str:
        parts = []
        for d in sorted(set(self.torsion)):
            m = self.torsion.count(d)
            parts.append(f"Z/{d}" if m == 1 else f"(Z/{d})^{m}")
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        return " + ".join(parts) if parts else "0"

    def __str__(self) -> str:
        return self.describe()

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": [str(d) for d in self.torsion]}

    @classmethod
    def from_json(cls, obj) -> "FgAbGroup":
        torsion = sorted((int(d) for d in obj.get("torsion", [])), key=lambda d: d)
        return cls(int(obj.get("free_rank", 0)), tuple(torsion))

    @classmethod
    def free(cls, r: int) -> "FgAbGroup":
        return cls(r, ())

    @classmethod
    def cyclic(cls, d: int) -> "FgAbGroup":
        if d == 0:
            return cls(1, ())
        if abs(d) == 1:
            return cls(0, ())
        return cls(0, (abs(d),))


def cokernel(M) -> FgAbGroup:
    """Z^rows / (column span of M), with change-of-basis witnesses."""
    m = as_int_array(M)
    n = m.shape[0]
    dec = snf(m)
    factors = dec.invariant_factors
    keep = [i for i, d in enumerate(factors) if d > 1] + list(range(len(factors), n))
    torsion = tuple(factors[i] for i in keep if i < len(factors))
    free = n - len(factors)
    to_c = dec.U.a[keep, :] if keep else zeros(0, n)
    from_c = dec.U_inv.a[:, keep] if keep else zeros(n, 0)
    return FgAbGroup(free, torsion, IntMatrix(m), IntMatrix(to_c), IntMatrix(from_c))


@dataclass(frozen=True)
class GroupHom:
    """Homomorphism between canonical forms, given on canonical generators."""

    source: FgAbGroup
    target: FgAbGroup
    matrix: IntMatrix

    def __post_init__(self):
        mat = self.matrix if isinstance(self.matrix, IntMatrix) else IntMatrix(self.matrix)
        m = as_int_array(mat) if mat.a.size else zeros(self.target.ngens, self.source.ngens)
        if m.shape != (self.target.ngens, self.source.ngens):
            raise ValueError(f"matrix shape {m.shape} does not match "
                             f"{self.target.ngens}x{self.source.ngens}")
        for j, d in enumerate(self.source.moduli):
            col = m[:, j]
            if d and not self.target.is_zero_element(col * d):
                raise IllDefined(f"generator {j} has order {d} but its image does not")
        for i, d in enumerate(self.target.moduli):
            if d:
                m[i] = m[i] % d
        object.__setattr__(self, "matrix", IntMatrix(m))

    def __call__(self, v) -> tuple[int, ...]:
        v = _vec(v)
        img = self.matrix.a.dot(v) if v.size else zeros(self.target.ngens, 1).ravel()
        return self.target.reduce(img)

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.matrix.a.ravel())

    def is_identity(self) -> bool:
        return (self.source.same_type(self.target)
                and np.array_equal(self.matrix.a, identity(self.source.ngens)))

    def compose(self, inner: "GroupHom") -> "GroupHom":
        """self after inner."""
        if not inner.target.same_type(self.source):
            raise ValueError("homomorphisms are not composable")
        return GroupHom(inner.source, self.target, IntMatrix(matmul(self.matrix.a, inner.matrix.a)))

    def lifted_relations(self) -> np.ndarray:
        """[matrix | target relations]: image lattice preimage generators in Z^ngens(target)."""
        return np.hstack([self.matrix.a, self.target.relation_matrix()])

    def is_injective(self) -> bool:
        # kernel in the presentation Z^k -> Z^m / R_t, modulo source relations
        ker = _preimage_lattice(self.matrix.a, self.target.relation_matrix())
        return _lattice_in(ker, self.source.relation_matrix())

    def is_surjective(self) -> bool:
        return cokernel(self.lifted_relations()).is_trivial

    def is_iso(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def to_json(self) -> dict:
        return {
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "matrix": self.matrix.to_json(),
        }

    @classmethod
    def from_json(cls, obj) -> "GroupHom":
        return cls(FgAbGroup.from_json(obj["source"]), FgAbGroup.from_json(obj["target"]),
                   IntMatrix.from_json(obj["matrix"]))

    @classmethod
    def identity(cls, g: FgAbGroup) -> "GroupHom":
        return cls(g, g, IntMatrix(identity(g.ngens)))


def compose(f: GroupHom, g: GroupHom) -> GroupHom:
    """f after g."""
    return f.compose(g)


def _preimage_lattice(F: np.ndarray, S: np.ndarray) -> np.ndarray:
    """Basis (columns) of {x : F x in span(S)}."""
    n = F.shape[1]
    big = np.hstack([F, S]) if S.shape[1] else F
    if big.shape[0] == 0:
        return identity(n)
    ker = kernel_basis(big)
    return ker[:n, :] if ker.size else zeros(n, 0)


def _lattice_in(L: np.ndarray, R: np.ndarray) -> bool:
    """span(L) <= span(R)."""
    if L.shape[1] == 0:
        return True
    if R.shape[1] == 0:
        return not np.any(L != 0)
    dec = snf(R)
    return all(solve_linear(R, L[:, j], dec) is not None for j in range(L.shape[1]))


def induced_on_quotients(F, source: FgAbGroup, target: FgAbGroup) -> GroupHom:
    """Hom between two presented groups induced by ``F`` on presentation coordinates.

    ``source`` and ``target`` must carry presentations (from :func:`cokernel`).
    Raises :class:`IllDefined` if ``F`` does not map relations into relations.
    """
    f = as_int_array(F)
    if source.relations is None or target.relations is None:
        raise ValueError("groups must carry presentations")
    rs, rt = source.relations.a, target.relations.a
    if f.shape != (rt.shape[0], rs.shape[0]):
        raise ValueError("matrix does not match presentation sizes")
    if rs.shape[1] and not _lattice_in(matmul(f, rs), rt):
        raise IllDefined("map does not send relations to relations")
    m = matmul(matmul(target.to_canonical.a, f), source.from_canonical.a)
    return GroupHom(FgAbGroup(source.free_rank, source.torsion),
                    FgAbGroup(target.free_rank, target.torsion), IntMatrix(m))


def subquotient(L: np.ndarray, R: np.ndarray) -> tuple[FgAbGroup, np.ndarray, np.ndarray]:
    """Structure of span(L) / span(R) for lattices R <= span(L) in Z^n.

    ``L`` must have independent columns.  Returns the group, a matrix whose
    columns are representatives (in Z^n) of the canonical generators, and a
    matrix mapping L-coordinates to canonical coordinates.
    """
    k = L.shape[1]
    coords = zeros(k, R.shape[1])
    if k:
        dec = snf(L)
        for j in range(R.shape[1]):
            sol = solve_linear(L, R[:, j], dec)
            if sol is None:
                raise ValueError("relation lattice is not inside the ambient lattice")
            coords[:, j] = sol.particular
    g = cokernel(coords)
    reps = matmul(L, g.from_canonical.a) if k else zeros(L.shape[0], 0)
    return g, reps, g.to_canonical.a


# ---------------------------------------------------------------------------
# GF(2)


def gf2_rref(M: np.ndarray):
    """Row reduction over GF(2) with transform: returns (R, E, pivots), E @ M = R."""
    A = (np.asarray(M, dtype=object) % 2).astype(np.uint8) if np.asarray(M).size else np.zeros(np.asarray(M).shape, np.uint8)
    n, m = A.shape
    E = np.eye(n, dtype=np.uint8)
    pivots = []
    r = 0
    for c in range(m):
        if r >= n:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            A[[r, p]] = A[[p, r]]
            E[[r, p]] = E[[p, r]]
        others = np.nonzero(A[:, c])[0]
        others = others[others != r]
        if others.size:
            A[others] ^= A[r]
            E[others] ^= E[r]
        pivots.append(c)
        r += 1
    return A, E, pivots


def gf2_rank(M) -> int:
    return len(gf2_rref(M)[2])


def gf2_solve(M, b):
    """Solve ``M x = b`` over GF(2).

    Returns ``(x, None)`` on success or ``(None, f)`` where ``f`` is a row
    vector with ``f M = 0`` and ``f b = 1`` mod 2.
    """
    m = np.asarray(M, dtype=object)
    b = np.array([int(v) % 2 for v in np.asarray(b, dtype=object).ravel()], dtype=np.uint8)
    n, cols = m.shape
    R, E, piv = gf2_rref(m)
    eb = (E.astype(np.int64) @ b.astype(np.int64)) % 2 if n else b
    r = len(piv)
    bad = np.nonzero(eb[r:])[0]
    if bad.size:
        return None, tuple(int(v) for v in E[r + int(bad[0])])
    x = np.zeros(cols, dtype=np.uint8)
    for i, c in enumerate(piv):
        x[c] = eb[i]
    return tuple(int(v) for v in x), None


def gf2_kernel(M) -> np.ndarray:
    """Columns spanning the GF(2) kernel of ``M``."""
    m = np.asarray(M, dtype=object)
    n, cols = m.shape
    R, _, piv = gf2_rref(m)
    free = [c for c in range(cols) if c not in set(piv)]
    out = np.zeros((cols, len(free)), dtype=np.uint8)
    for k, f in enumerate(free):
        out[f, k] = 1
        for i, c in enumerate(piv):
            if R[i, f]:
                out[c, k] = 1
    return out


def vector_gcd(v: Iterable[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g


def det(M) -> int:
    """Determinant of a square integer matrix (fraction-free Bareiss elimination)."""
    a = [[int(v) for v in row] for row in as_int_array(M)]
    n = len(a)
    if n == 0:
        return 1
    if any(len(r) != n for r in a):
        raise ValueError("determinant of a non-square matrix")
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            p = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if p is None:
                return 0
            a[k], a[p] = a[p], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]
