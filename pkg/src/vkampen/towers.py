"""Inverse sequences of finitely generated abelian groups: lim, lim¹ and Mittag-Leffler."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .exactalg import (
    FgAbGroup,
    GroupHom,
    IntMatrix,
    _preimage_lattice,
    _vec,
    check_functional,
    cokernel,
    det,
    identity,
    image,
    kernel_basis,
    matmul,
    separating_functional,
    snf,
    solve_linear,
    subquotient,
    zeros,
)

FINITE_WINDOW_CAVEAT = ("solution found on a finite window only; "
                        "this certifies nothing about the infinite system")


# ---------------------------------------------------------------------------
# Tower variants


@dataclass(frozen=True)
class StationaryTower:
    """G <- G <- G <- ... with every bonding map equal to ``endo``."""

    group: FgAbGroup
    endo: GroupHom

    def __post_init__(self):
        if not (self.endo.source.same_type(self.group) and self.endo.target.same_type(self.group)):
            raise ValueError("stationary bonding map must be an endomorphism of the group")

    @classmethod
    def scalar(cls, group: FgAbGroup, c: int) -> "StationaryTower":
        return cls(group, GroupHom(group, group, IntMatrix(identity(group.ngens) * c)))

    def to_json(self) -> dict:
        return {"variant": "stationary", "group": self.group.to_json(), "map": self.endo.matrix.to_json()}


@dataclass(frozen=True)
class ShiftMonomialTower:
    """Bonding maps e_k -> c·e_{k+s} on the countable direct sum of Z's."""

    shift: int
    scalar: int

    def __post_init__(self):
        if int(self.shift) != self.shift or self.shift < 0 or int(self.scalar) != self.scalar:
            raise ValueError("shift must be a nonnegative integer and scalar an integer")

    def to_json(self) -> dict:
        return {"variant": "shift", "shift": self.shift, "scalar": str(self.scalar)}


@dataclass(frozen=True)
class StationaryFromWindow:
    """Continue the window by repeating its last bonding map forever."""

    def to_json(self) -> dict:
        return {"kind": "stationary-from-window"}


@dataclass(frozen=True)
class DeclaredByAtlas:
    """A stationary continuation asserted by a built-in example, with its reference."""

    group: FgAbGroup
    endo: GroupHom
    reference: str

    def to_json(self) -> dict:
        return {"kind": "declared", "group": self.group.to_json(), "map": self.endo.matrix.to_json(),
                "reference": self.reference}


Hint = Union[None, StationaryFromWindow, DeclaredByAtlas]


@dataclass
class ExplicitTower:
    """Window G_1 <- G_2 <- ... <- G_D; ``maps[i]`` goes from groups[i+1] to groups[i].

    ``labels``/``scales`` optionally name the generators of each level and
    the factor relating a generator coordinate to the actual value.
    """

    groups: list
    maps: list
    hint: Hint = None
    labels: list | None = None
    scales: list | None = None

    def __post_init__(self):
        if len(self.groups) < 1 or len(self.maps) != len(self.groups) - 1:
            raise ValueError("an explicit tower needs D groups and D-1 bonding maps")
        for i, f in enumerate(self.maps):
            if not (f.source.same_type(self.groups[i + 1]) and f.target.same_type(self.groups[i])):
                raise ValueError(f"bonding map {i + 1} does not go from G_{i + 2} to G_{i + 1}")
        if self.labels is not None and [len(l) for l in self.labels] != [g.ngens for g in self.groups]:
            raise ValueError("labels do not match the group ranks")

    @property
    def depth(self) -> int:
        return len(self.groups)

    def composite(self, i: int, j: int) -> np.ndarray:
        """Matrix of G_j -> G_i (0-based levels, j >= i)."""
        out = identity(self.groups[j].ngens)
        for k in range(j - 1, i - 1, -1):
            out = matmul(self.maps[k].matrix.a, out)
        return out

    def tail(self) -> StationaryTower | None:
        if isinstance(self.hint, DeclaredByAtlas):
            return StationaryTower(self.hint.group, self.hint.endo)
        if isinstance(self.hint, StationaryFromWindow):
            if self.depth < 2 or not self.groups[-1].same_type(self.groups[-2]):
                raise ValueError("last bonding map is not an endomorphism; cannot continue stationarily")
            g = self.groups[-1]
            return StationaryTower(g, GroupHom(g, g, self.maps[-1].matrix))
        return None

    def to_json(self) -> dict:
        out = {
            "variant": "explicit",
            "groups": [g.to_json() for g in self.groups],
            "maps": [f.matrix.to_json() for f in self.maps],
            "hint": None if self.hint is None else self.hint.to_json(),
        }
        if self.labels is not None:
            out["labels"] = [[list(l) if isinstance(l, tuple) else l for l in level] for level in self.labels]
        if self.scales is not None:
            out["scales"] = [[str(s) for s in level] for level in self.scales]
        return out


Tower = Union[StationaryTower, ShiftMonomialTower, ExplicitTower]


def tower_from_json(obj) -> Tower:
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict) or "variant" not in obj:
        raise ValueError("tower JSON needs a 'variant' field")
    v = obj["variant"]
    if v == "stationary":
        g = FgAbGroup.from_json(obj["group"])
        return StationaryTower(g, GroupHom(g, g, IntMatrix.from_json(obj["map"])))
    if v == "shift":
        return ShiftMonomialTower(int(obj["shift"]), int(obj["scalar"]))
    if v == "explicit":
        groups = [FgAbGroup.from_json(g) for g in obj["groups"]]
        maps = [GroupHom(groups[i + 1], groups[i], IntMatrix.from_json(m)) for i, m in enumerate(obj["maps"])]
        hint = obj.get("hint")
        if hint is None:
            h = None
        elif hint.get("kind") == "stationary-from-window":
            h = StationaryFromWindow()
        elif hint.get("kind") == "declared":
            g = FgAbGroup.from_json(hint["group"])
            h = DeclaredByAtlas(g, GroupHom(g, g, IntMatrix.from_json(hint["map"])), hint.get("reference", ""))
        else:
            raise ValueError(f"unknown extension hint {hint!r}")
        labels = obj.get("labels")
        if labels is not None:
            labels = [[tuple(l) if isinstance(l, list) else l for l in level] for level in labels]
        scales = obj.get("scales")
        if scales is not None:
            scales = [[int(s) for s in level] for level in scales]
        return ExplicitTower(groups, maps, h, labels, scales)
    raise ValueError(f"unsupported tower variant {v!r}; only stationary, shift and explicit towers are accepted")


# ---------------------------------------------------------------------------
# Verdicts


@dataclass
class MLVerdict:
    status: str  # "holds" | "fails" | "inconclusive"
    certificate: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"status": self.status, "certificate": _jsonable(self.certificate)}


@dataclass
class Described:
    text: str

    def to_json(self) -> dict:
        return {"described": self.text}


@dataclass
class TowerVerdict:
    ml: MLVerdict
    lim: object  # FgAbGroup | Described | None (inconclusive)
    lim1: str  # "zero" | "nonzero" | "inconclusive"
    lim_certificate: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        if isinstance(self.lim, FgAbGroup):
            lim = {"group": self.lim.to_json(), "text": self.lim.describe()}
        elif isinstance(self.lim, Described):
            lim = self.lim.to_json()
        else:
            lim = "inconclusive"
        return {
            "ml": self.ml.to_json(),
            "lim": lim,
            "lim_certificate": _jsonable(self.lim_certificate),
            "lim1": self.lim1,
            "notes": list(self.notes),
        }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, IntMatrix):
        return x.to_json()
    if isinstance(x, np.ndarray):
        return IntMatrix(x).to_json() if x.ndim == 2 else [str(v) for v in x]
    if isinstance(x, FgAbGroup):
        return x.to_json()
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return str(x)


# ---------------------------------------------------------------------------
# Stationary towers


def _relations(g: FgAbGroup) -> np.ndarray:
    return g.relation_matrix()


def _image_lattice(gens: np.ndarray, rel: np.ndarray) -> np.ndarray:
    """Independent basis of span(gens) + span(rel)."""
    big = np.hstack([gens, rel]) if rel.shape[1] else gens
    if big.shape[1] == 0:
        return zeros(big.shape[0], 0)
    return image(big).basis.a


def _same_lattice(a: np.ndarray, b: np.ndarray) -> bool:
    if a.shape[1] != b.shape[1]:
        return False
    return _contains(a, b) and _contains(b, a)


def _contains(big: np.ndarray, small: np.ndarray) -> bool:
    if small.shape[1] == 0:
        return True
    if big.shape[1] == 0:
        return not np.any(small != 0)
    dec = snf(big)
    return all(solve_linear(big, small[:, j], dec) is not None for j in range(small.shape[1]))


def _power(A: np.ndarray, k: int) -> np.ndarray:
    out = identity(A.shape[0])
    for _ in range(k):
        out = matmul(A, out)
    return out


def _stationary_bound(g: FgAbGroup) -> int:
    order = 1
    for d in g.torsion:
        order *= d
    return g.free_rank + max(order.bit_length(), 1) + 2


def _saturation(B: np.ndarray) -> np.ndarray:
    """Basis of (Q-span of the columns of B) ∩ Z^n."""
    n = B.shape[0]
    if B.shape[1] == 0 or not np.any(B != 0):
        return zeros(n, 0)
    left = kernel_basis(B.T.copy())  # columns y with y^T B = 0
    if left.shape[1] == 0:
        return identity(n)
    return kernel_basis(left.T.copy())


def _rank(B: np.ndarray) -> int:
    return snf(B).rank if B.size else 0


def _stationary_ml(t: StationaryTower) -> tuple[MLVerdict, int | None]:
    g, A = t.group, t.endo.matrix.a
    R = _relations(g)
    n = g.ngens
    L_prev = _image_lattice(identity(n), R)
    bound = _stationary_bound(g)
    for k in range(bound + 1):
        L_next = _image_lattice(matmul(A, L_prev), R)
        if _same_lattice(L_prev, L_next):
            return MLVerdict("holds", {"k0": k, "image_basis": L_prev, "next_image_basis": L_next}), k
        L_prev = L_next
    cert = _descent_certificate(t)
    if cert is None:
        raise RuntimeError("image chain did not stabilize within the bound but no descent certificate exists")
    return MLVerdict("fails", cert), None


def _descent_certificate(t: StationaryTower) -> dict | None:
    """Strict-descent data on the free quotient: |det| of A on its stable image exceeds 1."""
    g = t.group
    nt, f = len(g.torsion), g.free_rank
    if f == 0:
        return None
    A = t.endo.matrix.a[nt:, nt:]
    stable = _saturation(_power(A, f))
    r = stable.shape[1]
    if r == 0:
        return None
    AW = zeros(r, r)
    dec = snf(stable)
    for j in range(r):
        sol = solve_linear(stable, matmul(A, stable[:, j:j + 1]).ravel(), dec)
        if sol is None:
            return None
        AW[:, j] = sol.particular
    D = det(AW)
    if abs(D) <= 1:
        return None
    indices = []
    M = _power(A, f)
    for k in range(f, f + 3):
        M_next = matmul(A, M)
        indices.append(_lattice_index(_image_lattice(M, zeros(f, 0)), _image_lattice(M_next, zeros(f, 0))))
        M = M_next
    return {"rational_rank": r, "stable_lattice": stable, "restricted_map": AW, "det": D,
            "checked_from_level": f, "descent_indices": indices}


def _lattice_index(big: np.ndarray, small: np.ndarray) -> int | None:
    if big.shape[1] != small.shape[1]:
        return None
    if big.shape[1] == 0:
        return 1
    coords = zeros(big.shape[1], small.shape[1])
    dec = snf(big)
    for j in range(small.shape[1]):
        coords[:, j] = solve_linear(big, small[:, j], dec).particular
    out = 1
    for d in snf(coords).invariant_factors:
        out *= d
    return out


def verify_descent(t: StationaryTower, cert: dict) -> bool:
    g = t.group
    nt, f = len(g.torsion), g.free_rank
    A = t.endo.matrix.a[nt:, nt:]
    stable = np.asarray(cert["stable_lattice"].a if isinstance(cert["stable_lattice"], IntMatrix)
                        else cert["stable_lattice"], dtype=object)
    AW = np.asarray(cert["restricted_map"], dtype=object)
    if not np.array_equal(matmul(A, stable), matmul(stable, AW)):
        return False
    Af = _power(A, f)
    if _rank(np.hstack([Af, stable])) != _rank(Af) or _rank(stable) != cert["rational_rank"] or _rank(Af) != cert["rational_rank"]:
        return False
    D = det(AW)
    return D == cert["det"] and abs(D) > 1 and all(i is not None and i > 1 for i in cert["descent_indices"])


def verify_holds(t: StationaryTower, cert: dict) -> bool:
    g, A = t.group, t.endo.matrix.a
    R = _relations(g)
    k = cert["k0"]
    Lk = _image_lattice(_power(A, k), R)
    Lk1 = _image_lattice(_power(A, k + 1), R)
    return _same_lattice(Lk, Lk1)


def _charpoly_certificate(A: np.ndarray) -> dict | None:
    """All irreducible factors of the characteristic polynomial have |constant term| >= 2."""
    import sympy

    M = sympy.Matrix(A.tolist())
    x = sympy.Symbol("x")
    poly = M.charpoly(x)
    _, factors = sympy.factor_list(poly.as_expr(), x)
    consts = []
    for fac, mult in factors:
        p = sympy.Poly(fac, x)
        c = int(p.eval(0))
        consts.append({"factor": str(fac), "multiplicity": mult, "constant": c})
        if abs(c) < 2:
            return None
    return {"rule": "injective endomorphism whose irreducible characteristic factors all have |constant term| >= 2",
            "charpoly": str(poly.as_expr()), "factors": consts}


def _stationary_verdict(t: StationaryTower) -> TowerVerdict:
    ml, k0 = _stationary_ml(t)
    g, A = t.group, t.endo.matrix.a
    if ml.status == "holds":
        L = ml.certificate["image_basis"]
        grp, reps, _ = subquotient(L, _relations(g))
        lim = FgAbGroup(grp.free_rank, grp.torsion)
        return TowerVerdict(ml, lim, "zero", {"rule": "stable image (bonding restricted to it is an automorphism)",
                                              "stable_image_reps": reps})
    notes = []
    lim = None
    cert = {}
    if not g.torsion and t.endo.is_injective():
        c = _charpoly_certificate(A)
        if c is not None:
            lim, cert = FgAbGroup(0, ()), c
    if lim is None:
        notes.append("lim is not determined by the implemented rules")
    return TowerVerdict(ml, lim, "nonzero", cert, notes)


# ---------------------------------------------------------------------------
# Shift towers


def _shift_verdict(t: ShiftMonomialTower) -> TowerVerdict:
    s, c = t.shift, t.scalar
    if c == 0:
        ml = MLVerdict("holds", {"k0": 1, "reason": "every bonding map is zero, so all deep images vanish"})
        return TowerVerdict(ml, FgAbGroup(0, ()), "zero", {"rule": "zero bonding maps"})
    if s == 0 and abs(c) == 1:
        ml = MLVerdict("holds", {"k0": 0, "reason": "bonding maps are automorphisms"})
        return TowerVerdict(ml, Described("countable direct sum of copies of Z"), "zero",
                            {"rule": "automorphism tower: lim is the group itself"})
    levels = [{"j": j, "image": f"{c ** j}*span(e_k : k >= {j * s})"} for j in range(1, 4)]
    ml = MLVerdict("fails", {"reason": "image of G_(i+j) in G_i is c^j * span(e_k : k >= j*s), strictly decreasing in j",
                             "shift": s, "scalar": c, "levels": levels})
    return TowerVerdict(ml, FgAbGroup(0, ()), "nonzero",
                        {"rule": "injective bonding maps and the intersection of all images is zero"})


def verify_shift(t: ShiftMonomialTower, ml: MLVerdict) -> bool:
    s, c = t.shift, t.scalar
    holds = c == 0 or (s == 0 and abs(c) == 1)
    return (ml.status == "holds") == holds


# ---------------------------------------------------------------------------
# Explicit windows


def window_diagnostics(t: ExplicitTower) -> list[dict]:
    """Image of each deeper level in G_1 ... G_D, described inside the window."""
    out = []
    for i in range(t.depth):
        R = _relations(t.groups[i])
        chain = []
        prev = None
        for j in range(i, t.depth):
            L = _image_lattice(t.composite(i, j), R)
            grp, _, _ = subquotient(L, R) if L.shape[1] else (FgAbGroup(0, ()), None, None)
            same = prev is not None and _same_lattice(prev, L)
            chain.append({"from_level": j + 1, "image": grp.describe(), "equals_previous": same})
            prev = L
        out.append({"level": i + 1, "images": chain})
    return out


def _explicit_verdict(t: ExplicitTower) -> TowerVerdict:
    tail = t.tail()
    diag = window_diagnostics(t)
    if tail is None:
        ml = MLVerdict("inconclusive", {"window": diag,
                                        "reason": "no extension hint: a finite window does not determine lim or lim^1"})
        return TowerVerdict(ml, None, "inconclusive", {}, ["window diagnostics only"])
    v = _stationary_verdict(tail)
    kind = "declared" if isinstance(t.hint, DeclaredByAtlas) else "stationary-from-window"
    notes = [f"verdict from the {kind} stationary continuation; a finite prefix changes neither lim nor lim^1"]
    if isinstance(t.hint, DeclaredByAtlas):
        notes.append(f"declared continuation: {t.hint.reference}")
        consistent = t.groups[-1].same_type(tail.group)
        notes.append("window end matches the declared group" if consistent else
                     "WARNING: window end does not match the declared group")
    v.ml.certificate["window"] = diag
    v.notes = notes + v.notes
    return v


# ---------------------------------------------------------------------------
# Public verdict API


def lim_lim1(t: Tower) -> TowerVerdict:
    if isinstance(t, StationaryTower):
        return _stationary_verdict(t)
    if isinstance(t, ShiftMonomialTower):
        return _shift_verdict(t)
    if isinstance(t, ExplicitTower):
        return _explicit_verdict(t)
    raise TypeError(f"not a tower: {type(t).__name__}")


def ml_verdict(t: Tower) -> MLVerdict:
    return lim_lim1(t).ml


def verify_verdict(t: Tower, v: TowerVerdict) -> bool:
    """Re-check the ML certificate and the lim¹ ⇔ ML correspondence."""
    if v.ml.status == "holds" and v.lim1 != "zero":
        return False
    if v.ml.status == "fails" and v.lim1 != "nonzero":
        return False
    if isinstance(t, ExplicitTower):
        t = t.tail()
        if t is None:
            return v.ml.status == "inconclusive"
    if isinstance(t, ShiftMonomialTower):
        return verify_shift(t, v.ml)
    if v.ml.status == "holds":
        return verify_holds(t, v.ml.certificate)
    if v.ml.status == "fails":
        return verify_descent(t, v.ml.certificate)
    return True


# ---------------------------------------------------------------------------
# Roos complex on a window


@dataclass
class RoosWindow:
    kernel: FgAbGroup
    kernel_reps: np.ndarray  # columns in the stacked generator coordinates of G_1..G_D
    cokernel: FgAbGroup
    matrix: np.ndarray  # F: stacked G_1..G_D -> stacked G_1..G_{D-1}
    target_relations: np.ndarray
    source_relations: np.ndarray

    def to_json(self) -> dict:
        return {"kernel": self.kernel.to_json(), "kernel_text": self.kernel.describe(),
                "cokernel": self.cokernel.to_json(), "cokernel_text": self.cokernel.describe(),
                "kernel_reps": IntMatrix(self.kernel_reps).to_json()}


def _offsets(groups) -> list[int]:
    out = [0]
    for g in groups:
        out.append(out[-1] + g.ngens)
    return out


def _block_diag(mats: Sequence[np.ndarray], rows: int) -> np.ndarray:
    cols = sum(m.shape[1] for m in mats)
    out = zeros(rows, cols)
    r = c = 0
    for m in mats:
        out[r:r + m.shape[0], c:c + m.shape[1]] = m
        r += m.shape[0]
        c += m.shape[1]
    return out


def roos_matrix(t: ExplicitTower) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(F, S, R): τ(x)_i = x_i - π_i x_{i+1} for i < D, target and source relations."""
    D = t.depth
    off = _offsets(t.groups)
    rows = off[D - 1]
    F = zeros(rows, off[D])
    for i in range(D - 1):
        n = t.groups[i].ngens
        F[off[i]:off[i] + n, off[i]:off[i] + n] = identity(n)
        F[off[i]:off[i] + n, off[i + 1]:off[i + 2]] = -t.maps[i].matrix.a
    S = _block_diag([_relations(g) for g in t.groups[:-1]], rows)
    R = _block_diag([_relations(g) for g in t.groups], off[D])
    return F, S, R


def roos_truncated(t: ExplicitTower) -> RoosWindow:
    """Kernel and cokernel of τ on the window, with the last level a free tail."""
    if t.depth < 2:
        raise ValueError("window depth must be at least 2")
    F, S, R = roos_matrix(t)
    coker = cokernel(np.hstack([F, S]) if S.shape[1] else F)
    pre = _preimage_lattice(F, S)
    L = _image_lattice(pre, zeros(pre.shape[0], 0)) if pre.shape[1] else pre
    if L.shape[1]:
        kern, reps, _ = subquotient(L, R)
    else:
        kern, reps = FgAbGroup(0, ()), zeros(F.shape[1], 0)
    return RoosWindow(FgAbGroup(kern.free_rank, kern.torsion), reps,
                      FgAbGroup(coker.free_rank, coker.torsion), F, S, R)


# ---------------------------------------------------------------------------
# Milnor sequence assembly


@dataclass
class MilnorReport:
    lower: TowerVerdict
    upper: TowerVerdict
    middle: str

    def to_json(self) -> dict:
        return {"lim1_lower": self.lower.lim1, "lim_upper": self.upper.to_json()["lim"],
                "middle": self.middle,
                "sequence": "0 -> lim^1 H^(m-1) -> H^m -> lim H^m -> 0",
                "lower": self.lower.to_json(), "upper": self.upper.to_json()}


def milnor_assemble(lower: Tower, upper: Tower) -> MilnorReport:
    lo, up = lim_lim1(lower), lim_lim1(upper)
    lim_text = (up.lim.describe() if isinstance(up.lim, FgAbGroup)
                else up.lim.text if isinstance(up.lim, Described) else None)
    if lo.lim1 == "zero":
        middle = f"isomorphic to lim of the upper tower: {lim_text}" if lim_text else \
            "isomorphic to lim of the upper tower (lim not determined)"
        if lim_text == "0":
            middle = "0"
    elif lo.lim1 == "nonzero":
        middle = ("nonzero: contains the nonzero lim^1 of the lower tower, with quotient "
                  + (lim_text if lim_text else "lim of the upper tower (not determined)")
                  + "; the extension is not resolved")
    else:
        middle = "inconclusive: lim^1 of the lower tower is not determined"
    return MilnorReport(lo, up, middle)


# ---------------------------------------------------------------------------
# Systems x_i - π_i(x_{i+1}) = c_i


@dataclass(frozen=True)
class Stabilizing:
    """Elements must stabilize: ∃k0 ∀j≥i ∀k≥max(j,k0): n_jk = n_{min(j,k0),k0}, with k0 <= depth - margin."""

    depth: int
    margin: int


@dataclass
class LimSystem:
    tower: ExplicitTower
    rhs: list  # c_1..c_{D-1}, generator coordinates
    constraint: Stabilizing | None = None

    def __post_init__(self):
        if len(self.rhs) != self.tower.depth - 1:
            raise ValueError("need one right-hand side per bonding map")
        for i, c in enumerate(self.rhs):
            if len(c) != self.tower.groups[i].ngens:
                raise ValueError(f"right-hand side {i + 1} has the wrong length")


@dataclass
class SystemResult:
    status: str  # "solution" | "no-solution-within-class" | "inconclusive"
    values: list | None = None
    k0: int | None = None
    certificate: dict = field(default_factory=dict)
    caveat: str = ""

    def to_json(self) -> dict:
        out = {"status": self.status, "caveat": self.caveat, "certificate": _jsonable(self.certificate)}
        if self.values is not None:
            out["values"] = [[str(v) for v in x] for x in self.values]
        if self.k0 is not None:
            out["k0"] = self.k0
        return out


def stabilization_rows(t: ExplicitTower, k0: int, depth: int) -> np.ndarray:
    """Linear equations (on stacked generator coordinates) forcing stabilization at column k0."""
    if t.labels is None:
        raise ValueError("stabilization needs (j, k) labels on the generators")
    off = _offsets(t.groups)
    scales = t.scales or [[1] * g.ngens for g in t.groups]
    rows = []
    for i in range(t.depth):
        level = i + 1
        pos = {lab: p for p, lab in enumerate(t.labels[i])}
        for (j, k), p in pos.items():
            if j < level or k < max(j, k0) or k > depth:
                continue
            ref = (min(j, k0), k0)
            q = pos.get(ref)
            if q is None:
                raise ValueError(f"reference coordinate {ref} missing at level {level}")
            if q == p:
                continue
            row = [0] * off[-1]
            row[off[i] + p] += scales[i][p]
            row[off[i] + q] -= scales[i][q]
            rows.append(row)
    return np.array(rows, dtype=object).reshape(len(rows), off[-1])


def _system_matrix(t: ExplicitTower, extra: np.ndarray | None):
    F, S, _ = roos_matrix(t)
    M = np.hstack([F, S]) if S.shape[1] else F
    if extra is not None and extra.shape[0]:
        pad = zeros(extra.shape[0], M.shape[1] - extra.shape[1])
        M = np.vstack([M, np.hstack([extra, pad])])
    return M, F.shape[1]


def system_solve(s: LimSystem) -> SystemResult:
    t = s.tower
    off = _offsets(t.groups)
    c = [int(v) for ci in s.rhs for v in ci]
    if s.constraint is None:
        M, n = _system_matrix(t, None)
        sol = solve_linear(M, c)
        if sol is None:
            f, d = separating_functional(M, c)
            return SystemResult("no-solution-within-class", certificate={"functional": f, "modulus": d,
                                                                         "class": "all window sequences"})
        x = sol.particular[:n]
        vals = [list(x[off[i]:off[i + 1]]) for i in range(t.depth)]
        return SystemResult("solution", vals, caveat=FINITE_WINDOW_CAVEAT)
    depth, margin = s.constraint.depth, s.constraint.margin
    if depth > t.depth:
        raise ValueError("constraint depth exceeds the window")
    witnesses = []
    for k0 in range(1, depth - margin + 1):
        extra = stabilization_rows(t, k0, depth)
        M, n = _system_matrix(t, extra)
        rhs = c + [0] * extra.shape[0]
        sol = solve_linear(M, rhs)
        if sol is not None:
            x = sol.particular[:n]
            vals = [list(x[off[i]:off[i + 1]]) for i in range(t.depth)]
            return SystemResult("solution", vals, k0=k0,
                                caveat=f"solution stabilizing at column {k0} on a window of depth {depth}")
        f, d = separating_functional(M, rhs)
        witnesses.append({"k0": k0, "functional": list(f), "modulus": d})
    return SystemResult("no-solution-within-class",
                        certificate={"class": f"stabilizing at some k0 <= {depth - margin}",
                                     "depth": depth, "margin": margin, "per_k0": witnesses},
                        caveat=f"no solution among sequences stabilizing by column {depth - margin} "
                               f"on a window of depth {depth}")


def verify_system_result(s: LimSystem, r: SystemResult) -> bool:
    t = s.tower
    c = [int(v) for ci in s.rhs for v in ci]
    if r.status == "solution":
        return check_solution(s, r.values, r.k0)
    if r.status != "no-solution-within-class":
        return True
    if s.constraint is None:
        M, _ = _system_matrix(t, None)
        return check_functional(M, c, r.certificate["functional"], r.certificate["modulus"])
    for w in r.certificate["per_k0"]:
        extra = stabilization_rows(t, w["k0"], s.constraint.depth)
        M, _ = _system_matrix(t, extra)
        if not check_functional(M, c + [0] * extra.shape[0], w["functional"], w["modulus"]):
            return False
    return len(r.certificate["per_k0"]) == s.constraint.depth - s.constraint.margin


def check_solution(s: LimSystem, values: list, k0: int | None = None) -> bool:
    """x_i - π_i x_{i+1} = c_i in G_i, plus stabilization at k0 if constrained."""
    t = s.tower
    for i in range(t.depth - 1):
        lhs = _vec(values[i]) - t.maps[i].matrix.a.dot(_vec(values[i + 1]))
        if not t.groups[i].is_zero_element(lhs - _vec(s.rhs[i])):
            return False
    if s.constraint is not None:
        if k0 is None:
            return False
        rows = stabilization_rows(t, k0, s.constraint.depth)
        x = _vec([v for level in values for v in level])
        if rows.shape[0] and any(v != 0 for v in rows.dot(x)):
            return False
    return True


# ---------------------------------------------------------------------------
# Connecting homomorphism lim(G ⊗ Z/2) -> lim¹ G


class OddDifference(ValueError):
    """A difference of lifts is odd, so the input was not a mod-2 thread."""


class NotAThread(ValueError):
    """The mod-2 sequence is not compatible with the bonding maps."""


@dataclass
class Delta218Result:
    lifts: list
    differences: list  # m^i
    halves: list  # m^i / 2
    verdict: SystemResult | None

    def to_json(self) -> dict:
        return {
            "lifts": [[str(v) for v in x] for x in self.lifts],
            "differences": [[str(v) for v in x] for x in self.differences],
            "halves": [[str(v) for v in x] for x in self.halves],
            "verdict": None if self.verdict is None else self.verdict.to_json(),
        }


def delta_218(t: ExplicitTower, w: Sequence[Sequence[int]], lifts: Sequence[Sequence[int]] | None = None,
              constraint: Stabilizing | None = None, solve: bool = True) -> Delta218Result:
    """Image of a mod-2 thread under the connecting map to lim¹, on a window of free groups."""
    if any(g.torsion for g in t.groups):
        raise ValueError("connecting map is implemented for towers of free groups")
    D = t.depth
    if len(w) != D:
        raise ValueError("thread must have one entry per level")
    w = [[int(v) % 2 for v in wi] for wi in w]
    for i in range(D - 1):
        img = t.maps[i].matrix.a.dot(_vec(w[i + 1])) if len(w[i + 1]) else zeros(len(w[i]), 1).ravel()
        if any((a - b) % 2 for a, b in zip(img, w[i])):
            raise NotAThread(f"level {i + 1}: bonding image of w_{i + 2} differs from w_{i + 1} mod 2")
    if lifts is None:
        lifts = w
    lifts = [[int(v) for v in x] for x in lifts]
    for i in range(D):
        if any((a - b) % 2 for a, b in zip(lifts[i], w[i])):
            raise ValueError(f"lift at level {i + 1} does not reduce to the thread")
    diffs, halves = [], []
    for i in range(D - 1):
        m = _vec(lifts[i]) - t.maps[i].matrix.a.dot(_vec(lifts[i + 1]))
        if any(v % 2 for v in m):
            raise OddDifference(f"difference at level {i + 1} is odd")
        diffs.append([int(v) for v in m])
        halves.append([int(v) // 2 for v in m])
    verdict = system_solve(LimSystem(t, halves, constraint)) if solve else None
    return Delta218Result(lifts, diffs, halves, verdict)


def in_roos_image(t: ExplicitTower, seq: Sequence[Sequence[int]]) -> bool:
    """Whether a window sequence lies in the image of τ."""
    F, S, _ = roos_matrix(t)
    M = np.hstack([F, S]) if S.shape[1] else F
    return solve_linear(M, [int(v) for c in seq for v in c]) is not None


# ---------------------------------------------------------------------------
# Comparison with a stationary model


def comparison_isomorphisms(t: ExplicitTower, model: StationaryTower) -> list[GroupHom] | None:
    """Isomorphisms φ_i: G_i -> G with φ_i π_i = A φ_{i+1}, for free groups; None if none exist."""
    if model.group.torsion or any(g.torsion for g in t.groups):
        raise ValueError("comparison is implemented for free groups")
    g = model.group
    if not all(h.same_type(g) for h in t.groups):
        return None
    A = model.endo.matrix.a
    phis = [identity(g.ngens)]
    dec = snf(A)
    for i in range(t.depth - 1):
        target = matmul(phis[i], t.maps[i].matrix.a)
        nxt = zeros(g.ngens, g.ngens)
        for j in range(g.ngens):
            sol = solve_linear(A, target[:, j], dec)
            if sol is None or sol.kernel:
                return None
            nxt[:, j] = sol.particular
        if abs(det(nxt)) != 1:
            return None
        phis.append(nxt)
    return [GroupHom(t.groups[i], g, IntMatrix(p)) for i, p in enumerate(phis)]


def check_comparison(t: ExplicitTower, model: StationaryTower, phis: list[GroupHom]) -> bool:
    A = model.endo.matrix.a
    for i, p in enumerate(phis):
        d = snf(p.matrix.a)
        if tuple(d.invariant_factors) != (1,) * p.matrix.rows or p.matrix.rows != p.matrix.cols:
            return False
        if i < t.depth - 1:
            if not np.array_equal(matmul(p.matrix.a, t.maps[i].matrix.a), matmul(A, phis[i + 1].matrix.a)):
                return False
    return True
