"""Finite-stage models of the worked example compacta, with machine-checkable claims."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable

from .complexes import (
    Filtration,
    SimplicialComplex,
    SimplicialMap,
    mapping_cylinder,
    mapping_telescope,
    polygon,
    rp2,
    simplex_skeleton,
    suspension,
    tower_from_filtration,
    wrap_map,
)
from .exactalg import FgAbGroup, GroupHom, IntMatrix, identity, zeros
from .towers import DeclaredByAtlas, ExplicitTower, StationaryTower

CONE_STAND_IN = "one-point compactification modeled by coning the last level"


# ---------------------------------------------------------------------------
# Sphere models and maps between them


def sphere_model(n: int, m: int) -> SimplicialComplex:
    """S^{n-1} as the (n-2)-fold suspension of an m-gon (n >= 2)."""
    if n < 2:
        raise ValueError("sphere models need n >= 2")
    K = polygon(m)
    for _ in range(n - 2):
        K = suspension(K)
    return K


def degree_map(n: int, m: int, p: int) -> SimplicialMap:
    """Degree-p map from the (p·m)-gon model of S^{n-1} to the m-gon model."""
    return wrap_map(n - 1, m, p)


def collapse_to_simplex_boundary(n: int, m: int, simplex: tuple) -> SimplicialMap:
    """Degree-one map from the m-gon model of S^{n-1} onto the boundary of an n-simplex.

    The target uses the vertex ids in ``simplex`` (length n+1).
    """
    if len(simplex) != n + 1:
        raise ValueError("need n+1 simplex vertices")
    src = sphere_model(n, m)
    images = _collapse_images(n, m, list(simplex))
    target = simplex_skeleton_on(simplex, n - 1)
    return SimplicialMap(src, target, images)


def _collapse_images(n: int, m: int, s: list) -> dict:
    if n == 2:
        return {j: s[(3 * j) // m] for j in range(m)}
    inner = _collapse_images(n - 1, m, s[:-1])
    count = len(sphere_model(n - 1, m).vertices)
    inner[("N", count)] = s[-1]
    inner[("S", count)] = s[0]
    return inner


def simplex_skeleton_on(vertices, d: int) -> SimplicialComplex:
    return SimplicialComplex(list(vertices), combinations(list(vertices), d + 1))


# ---------------------------------------------------------------------------
# Claims and entries


@dataclass
class Claim:
    operation: str
    expected: object
    reference: str
    check: Callable[[], object] = field(repr=False, default=None)

    def run(self) -> dict:
        observed = self.check()
        return {"operation": self.operation, "expected": _show(self.expected), "observed": _show(observed),
                "reference": self.reference, "ok": observed == self.expected}


def _show(x):
    if isinstance(x, (list, tuple)):
        return [_show(v) for v in x]
    if isinstance(x, FgAbGroup):
        return x.describe()
    return x if isinstance(x, (str, int, bool, type(None))) else str(x)


@dataclass
class AtlasEntry:
    name: str
    parameters: dict
    product: dict
    claims: list
    notes: list = field(default_factory=list)

    def run_claims(self) -> list[dict]:
        return [c.run() for c in self.claims]


# ---------------------------------------------------------------------------
# Builders


def flores_skeleton(n: int) -> SimplicialComplex:
    """n-skeleton of the (2n+2)-simplex."""
    K = simplex_skeleton(2 * n + 2, n)
    K.name = f"flores{n}"
    return K


def padic_tree_stage(p: int, k: int) -> tuple[SimplicialComplex, SimplicialMap | None]:
    """Telescope Z/p^k -> ... -> Z/p -> 0 of the maps x -> floor(x/p), and its bonding map.

    Vertex (j, x) is x in Z/p^j.  The bonding map to stage k-1 shrinks the
    last cylinder to the point (0, 0) and reduces x mod p^(j-1) elsewhere.
    """
    if p < 2 or k < 0:
        raise ValueError("need p >= 2 and k >= 0")
    X = _padic(p, k)
    if k == 0:
        return X, None
    Y = _padic(p, k - 1)
    images = {(0, 0): (0, 0)}
    for j in range(1, k + 1):
        for x in range(p ** j):
            images[(j, x)] = (j - 1, x % p ** (j - 1)) if j > 1 else (0, 0)
    return X, SimplicialMap(X, Y, images)


def _padic(p: int, k: int) -> SimplicialComplex:
    verts = [(j, x) for j in range(k, -1, -1) for x in range(p ** j)]
    edges = [((j, x), (j - 1, x // p)) for j in range(1, k + 1) for x in range(p ** j)]
    return SimplicialComplex(verts, edges or [[(0, 0)]], name=f"padic{p}^{k}")


@dataclass
class SklyarenkoStage:
    complex: SimplicialComplex
    filtration: Filtration
    n: int
    p: int
    k: int
    apex: object

    def tower(self, declared: bool = True) -> ExplicitTower:
        hint = None
        if declared:
            Z = FgAbGroup.free(1)
            hint = DeclaredByAtlas(Z, GroupHom(Z, Z, IntMatrix([[self.p]])),
                                   "support enlargement is multiplication by p at every level")
        return tower_from_filtration(self.complex, self.filtration, self.n, hint=hint)


def _direct_sphere_telescope(n: int, p: int, k: int, tag) -> tuple[list, list, list]:
    """Facets of the telescope S_0 -> ... -> S_k of degree-p maps, per cylinder, plus end sphere.

    S_i is the (3 p^(k-i))-gon model; vertices are tagged (tag, level, v).
    """
    maps = [degree_map(n, 3 * p ** (k - i - 1), p) for i in range(k)]
    T, F = mapping_telescope(maps)
    rel = lambda v: (tag, v[0], v[1])
    per_cyl = []
    prev: set = set()
    for st in F.stages:
        cur = {tuple(rel(v) for v in f) for f in _all_top(st)}
        per_cyl.append([list(f) for f in sorted(cur - prev, key=repr)])
        prev = cur
    end = [[(tag, k, v) for v in f] for f in maps[-1].target.facets()]
    return [rel(v) for v in T.vertices], per_cyl, end


def _all_top(K: SimplicialComplex) -> list:
    return K.facets()


def sklyarenko_stage(n: int, p: int, k: int) -> SklyarenkoStage:
    """Telescope of k degree-p self-maps of S^{n-1} with the last level coned, and its filtration.

    U_i is the union of the first i cylinders, for i = 1..k-1.
    """
    if n < 2 or p < 1 or k < 2:
        raise ValueError("need n >= 2, p >= 1, k >= 2")
    tag = "T"
    verts, per_cyl, end = _direct_sphere_telescope(n, p, k, tag)
    apex = (tag, "inf")
    cone = [f + [apex] for f in end]
    facets = [f for cyl in per_cyl for f in cyl] + cone
    X = SimplicialComplex(verts + [apex], facets, name=f"sklyarenko({n},{p},{k})")
    stages = []
    acc: list = []
    for cyl in per_cyl[:-1]:
        acc = acc + cyl
        stages.append(X.subcomplex(acc))
    return SklyarenkoStage(X, Filtration(X, stages), n, p, k, apex)


@dataclass
class LjubljanaWindow:
    """Truncated doubly indexed groups with the mod-2 thread and reference lifts.

    Level i has coordinates (j, k), 1 <= j <= k <= depth, with j >= i or k = j.
    Diagonal generators stand for the even value twice the coordinate.
    """

    tower: ExplicitTower
    thread: list
    lifts: list
    depth: int
    n: int

    def actual(self, level: int, x) -> dict:
        labels, scales = self.tower.labels[level - 1], self.tower.scales[level - 1]
        return {lab: s * int(v) for lab, s, v in zip(labels, scales, x)}


def ljubljana_tower(n: int, depth: int) -> LjubljanaWindow:
    if depth < 2:
        raise ValueError("depth must be at least 2")
    labels = []
    for i in range(1, depth + 1):
        labels.append([(j, k) for j in range(1, depth + 1) for k in range(j, depth + 1) if j >= i or k == j])
    scales = [[2 if j == k else 1 for (j, k) in lab] for lab in labels]
    groups = [FgAbGroup.free(len(l)) for l in labels]
    maps = []
    for i in range(depth - 1):
        pos = {lab: r for r, lab in enumerate(labels[i])}
        m = zeros(len(labels[i]), len(labels[i + 1]))
        for c, lab in enumerate(labels[i + 1]):
            m[pos[lab], c] = 1
        maps.append(GroupHom(groups[i + 1], groups[i], IntMatrix(m)))
    tower = ExplicitTower(groups, maps, labels=labels, scales=scales)
    thread = [[1 if j == k else 0 for (j, k) in lab] for lab in labels]
    lifts = [[1 if j == k else 2 for (j, k) in lab] for lab in labels]
    return LjubljanaWindow(tower, thread, lifts, depth, n)


# -- simplices replaced by telescopes ------------------------------------------


def _replace_with_telescope(n: int, sigma: tuple, tag, levels_maps: list[SimplicialMap], attach: int,
                            cone_level: int, apex) -> list:
    """Facets replacing the n-simplex sigma by an annulus plus a telescope coned at one end.

    ``levels_maps`` are the telescope maps; ``attach`` is the level glued to the
    boundary of sigma through a degree-one collapse.
    """
    T, _ = mapping_telescope(levels_maps)
    rel = lambda v: (tag, v[0], v[1])
    facets = [[rel(v) for v in f] for f in T.facets()]
    levels = [levels_maps[0].source] + [f.target for f in levels_maps]
    attach_model = levels[attach]
    m = _polygon_size(attach_model, n)
    g = collapse_to_simplex_boundary(n, m, sigma)
    cyl = mapping_cylinder(g)
    for f in cyl.complex.facets():
        facets.append([(tag, attach, v[1]) if v[0] == 0 else v[1] for v in f])
    for f in levels[cone_level].facets():
        facets.append([(tag, cone_level, v) for v in f] + [apex])
    return facets


def _polygon_size(model: SimplicialComplex, n: int) -> int:
    return len(model.vertices) - 2 * (n - 2)


def example_2_6_stage(n: int, k: int, simplices: list | None = None) -> SimplicialComplex:
    """n-skeleton of the (2n+2)-simplex with each n-simplex replaced by an annulus and
    an inverse telescope of k degree-two maps, coned at its deep end.

    Telescope level 0 is the deep end; level k is glued to the simplex boundary.
    """
    if n < 2 or k < 1:
        raise ValueError("need n >= 2 and k >= 1")
    K = flores_skeleton(n)
    tops = [tuple(K.labels(s)) for s in K.simplices[n]]
    chosen = tops if simplices is None else [tuple(s) for s in simplices]
    facets = [list(K.labels(s)) for s in K.simplices[n - 1]]
    facets += [list(s) for s in tops if s not in chosen]
    for idx, sigma in enumerate(chosen):
        maps = [degree_map(n, 3 * 2 ** (j - 1), 2) for j in range(k, 0, -1)]
        tag = ("hole", idx)
        facets += _replace_with_telescope(n, sigma, tag, maps, attach=k, cone_level=0, apex=(tag, "inf"))
    verts = list(K.vertices) + sorted({v for f in facets for v in f if v not in K.pos}, key=repr)
    return SimplicialComplex(verts, facets, name=f"inverse-telescope-flores({n},{k})")


def inverse_telescope_bonding(n: int, k: int, simplices: list | None = None) -> SimplicialMap:
    """Map from stage k+1 to stage k collapsing each deepest cylinder onto the cone point."""
    big = example_2_6_stage(n, k + 1, simplices)
    small = example_2_6_stage(n, k, simplices)
    images = {}
    for v in big.vertices:
        if isinstance(v, tuple) and len(v) == 3 and isinstance(v[0], tuple) and v[0][0] == "hole":
            tag, level, w = v
            images[v] = (tag, "inf") if level == 0 else (tag, level - 1, w)
        elif isinstance(v, tuple) and len(v) == 2 and v[1] == "inf":
            images[v] = v
        else:
            images[v] = v
    return SimplicialMap(big, small, images)


def example_2_12_stage(n: int, p: int, k: int) -> SimplicialComplex:
    """n-skeleton of the (2n+2)-simplex; one n-simplex has a ball replaced by a coned direct
    telescope of k degree-p maps, whose cone point is identified with the barycenter of a
    disjoint n-simplex."""
    K = flores_skeleton(n)
    first = tuple(range(n + 1))
    second = tuple(range(n + 1, 2 * n + 2))
    bary = ("bary", first)
    facets = []
    for d in range(n + 1):
        for s in K.simplices[d]:
            lab = tuple(K.labels(s))
            if d == n and lab in (first, second):
                continue
            facets.append(list(lab))
    for face in combinations(first, n):
        facets.append(list(face) + [bary])
    maps = [degree_map(n, 3 * p ** (k - i - 1), p) for i in range(k)]
    facets += _replace_with_telescope(n, second, "skl", maps, attach=0, cone_level=k, apex=bary)
    verts = list(K.vertices) + sorted({v for f in facets for v in f if v not in K.pos}, key=repr)
    return SimplicialComplex(verts, facets, name=f"pinched-flores({n},{p},{k})")


@dataclass
class WedgeStage:
    complex: SimplicialComplex
    filtration: Filtration
    n: int
    p: int
    k: int

    def tower(self) -> ExplicitTower:
        return tower_from_filtration(self.complex, self.filtration, self.n)


def wedge_double_stage(n: int, p: int, k: int) -> WedgeStage:
    """Two coned telescopes of degree-p maps joined at their cone points, with the
    filtration by the first i cylinders of both copies."""
    if n < 2 or k < 2:
        raise ValueError("need n >= 2 and k >= 2")
    apex = "inf"
    parts = []
    for tag in ("A", "B"):
        verts, per_cyl, end = _direct_sphere_telescope(n, p, k, tag)
        parts.append((verts, per_cyl, [f + [apex] for f in end]))
    verts = parts[0][0] + parts[1][0] + [apex]
    facets = [f for pt in parts for cyl in pt[1] for f in cyl] + parts[0][2] + parts[1][2]
    X = SimplicialComplex(verts, facets, name=f"wedge-sklyarenko({n},{p},{k})")
    stages = []
    acc: list = []
    for i in range(k - 1):
        acc = acc + parts[0][1][i] + parts[1][1][i]
        stages.append(X.subcomplex(acc))
    return WedgeStage(X, Filtration(X, stages), n, p, k)


# -- projective spaces and their double covers ----------------------------------


@dataclass
class DoubleCover:
    cover: SimplicialComplex
    base: SimplicialComplex
    projection: SimplicialMap


def projective_cover(n: int) -> DoubleCover:
    """Simplicial double cover S^n -> RP^n for n in {1, 2, 3}."""
    if n == 1:
        base = polygon(3)
        cover = polygon(6)
        return DoubleCover(cover, base, SimplicialMap(cover, base, {j: j % 3 for j in range(6)}))
    if n == 2:
        return _cover_from_cocycle(rp2())
    if n == 3:
        return _cross_polytope_quotient()
    raise ValueError("projective models are provided for n = 1, 2, 3")


def _cover_from_cocycle(base: SimplicialComplex) -> DoubleCover:
    cx = base.chain_complex("Z2")
    h = cx.cohomology(1)
    if h.group.ngens != 1:
        raise ValueError("base must have a unique nonzero mod-2 degree-one class")
    c = {base.labels(e): int(h.reps[i, 0]) % 2 for i, e in enumerate(base.simplices[1])}
    root = base.vertices[0]
    # integrate the cocycle along a spanning tree
    level = {root: 0}
    frontier = [root]
    edges = [base.labels(e) for e in base.simplices[1]]
    while frontier:
        nxt = []
        for u in frontier:
            for e in edges:
                if u in e:
                    v = e[1] if e[0] == u else e[0]
                    if v not in level:
                        level[v] = (level[u] + c[e]) % 2
                        nxt.append(v)
        frontier = nxt
    verts = [(v, a) for v in base.vertices for a in (0, 1)]
    facets = []
    for f in base.facets():
        for a in (0, 1):
            facets.append([(v, (a + level[v] + _twist_sum(c, f[0], v, level)) % 2) for v in f])
    cover = SimplicialComplex(verts, facets, name=f"cover({base.name})")
    proj = SimplicialMap(cover, base, {(v, a): v for v in base.vertices for a in (0, 1)})
    return DoubleCover(cover, base, proj)


def _twist_sum(c: dict, u, v, level: dict) -> int:
    if u == v:
        return 0
    e = (u, v) if (u, v) in c else (v, u)
    return (c[e] + level[u] + level[v]) % 2


def _cross_polytope_quotient() -> DoubleCover:
    axes = [(i, s) for i in range(4) for s in (1, -1)]
    facets = [tuple((i, signs[i]) for i in range(4)) for signs in
              [(a, b, c, d) for a in (1, -1) for b in (1, -1) for c in (1, -1) for d in (1, -1)]]
    faces = set()
    for f in facets:
        for r in range(1, 5):
            faces.update(frozenset(x) for x in combinations(f, r))
    # barycentric subdivision: flags of faces
    flags = []
    for f in facets:
        for order in _permutations(list(f)):
            flags.append(tuple(frozenset(order[:r]) for r in range(1, 5)))
    key = lambda F: tuple(sorted(F))
    neg = lambda F: frozenset((i, -s) for (i, s) in F)
    verts = sorted(faces, key=lambda F: (len(F), key(F)))
    cover = SimplicialComplex([key(F) for F in verts], [[key(F) for F in fl] for fl in flags], name="S3")
    canon = lambda F: min(key(F), key(neg(F)))
    base_verts = sorted({canon(F) for F in verts}, key=lambda t: (len(t), t))
    base = SimplicialComplex(base_verts, [[canon(F) for F in fl] for fl in flags], name="RP3")
    proj = SimplicialMap(cover, base, {key(F): canon(F) for F in verts})
    del axes
    return DoubleCover(cover, base, proj)


def _permutations(xs: list) -> list:
    if len(xs) <= 1:
        return [xs]
    out = []
    for i, x in enumerate(xs):
        for rest in _permutations(xs[:i] + xs[i + 1:]):
            out.append([x] + rest)
    return out


@dataclass
class AkhmetievStage:
    complex: SimplicialComplex
    bonding: SimplicialMap | None  # stage i -> stage i-1
    cover: DoubleCover
    i: int


def akhmetiev_stage(n: int, i: int) -> AkhmetievStage:
    """i disjoint n-spheres plus RP^n; the bonding map to stage i-1 is the identity on the
    common part and the double cover on the i-th sphere."""
    if i < 0:
        raise ValueError("stage index must be nonnegative")
    dc = projective_cover(n)
    M = _akh(dc, i)
    bonding = None
    if i >= 1:
        prev = _akh(dc, i - 1)
        images = {}
        for v in M.vertices:
            if v[0] == i:
                images[v] = ("P", dc.projection(v[1]))
            else:
                images[v] = v
        bonding = SimplicialMap(M, prev, images)
    return AkhmetievStage(M, bonding, dc, i)


def _akh(dc: DoubleCover, i: int) -> SimplicialComplex:
    verts, facets = [], []
    for s in range(1, i + 1):
        verts += [(s, v) for v in dc.cover.vertices]
        facets += [[(s, v) for v in f] for f in dc.cover.facets()]
    verts += [("P", v) for v in dc.base.vertices]
    facets += [[("P", v) for v in f] for f in dc.base.facets()]
    return SimplicialComplex(verts, facets, name=f"akhmetiev_{i}")


# ---------------------------------------------------------------------------
# Registry


def _group(cx, d):
    return cx.cohomology(d).group


def _entries() -> dict[str, Callable[..., AtlasEntry]]:
    return {
        "flores": _entry_flores,
        "padic-tree": _entry_padic,
        "sklyarenko": _entry_sklyarenko,
        "ljubljana": _entry_ljubljana,
        "inverse-telescope-flores": _entry_inverse_telescope,
        "pinched-flores": _entry_pinched,
        "wedge-sklyarenko": _entry_wedge,
        "akhmetiev": _entry_akhmetiev,
    }


def atlas_names() -> list[str]:
    return sorted(_entries())


def build(name: str, **params) -> AtlasEntry:
    try:
        builder = _entries()[name]
    except KeyError:
        raise ValueError(f"unknown atlas entry {name!r}; known: {', '.join(atlas_names())}") from None
    return builder(**params)


def _entry_flores(n: int = 1) -> AtlasEntry:
    from .complexes import is_zero
    from .obstruction import char_class, deleted_product

    K = flores_skeleton(n)
    claims = [
        Claim("count_top_simplices", len(list(combinations(range(2 * n + 3), n + 1))),
              "n-skeleton of the (2n+2)-simplex", lambda: K.count(n)),
        Claim("vk_class", "nonzero", "obstruction in degree 2n does not vanish",
              lambda: is_zero(char_class(deleted_product(K), 2 * n)).label),
    ]
    return AtlasEntry("flores", {"n": n}, {"complex": K}, claims)


def _entry_padic(p: int = 2, k: int = 2) -> AtlasEntry:
    from .complexes import is_zero
    from .obstruction import char_class_or_zero, deleted_product

    X, bond = padic_tree_stage(p, k)
    claims = [
        Claim("cohomology H^1", "0", "every stage is a tree", lambda: _group(X.chain_complex(), 1).describe()
              if X.dim >= 1 else "0"),
        Claim("cohomology H^0", "Z", "every stage is connected", lambda: _group(X.chain_complex(), 0).describe()),
        Claim("vk_class", "zero", "stages are planar", lambda: is_zero(char_class_or_zero(deleted_product(X), 2)[0]).label),
    ]
    return AtlasEntry("padic-tree", {"p": p, "k": k}, {"complex": X, "bonding": bond}, claims)


def _entry_sklyarenko(n: int = 2, p: int = 2, k: int = 4) -> AtlasEntry:
    from .towers import comparison_isomorphisms, lim_lim1

    st = sklyarenko_stage(n, p, k)
    model = StationaryTower.scalar(FgAbGroup.free(1), p)
    claims = [
        Claim("tower_from_filtration levelwise model", True, "each relative group is Z and enlargement is multiplication by p",
              lambda: comparison_isomorphisms(st.tower(), model) is not None),
        Claim("lim_lim1", "nonzero" if p > 1 else "zero", "lim^1 of the support-enlargement tower",
              lambda: lim_lim1(st.tower()).lim1),
    ]
    return AtlasEntry("sklyarenko", {"n": n, "p": p, "k": k}, {"complex": st.complex, "filtration": st.filtration},
                      claims, [CONE_STAND_IN])


def _entry_ljubljana(n: int = 1, depth: int = 6, margin: int = 2) -> AtlasEntry:
    from .towers import LimSystem, Stabilizing, check_solution, delta_218

    lw = ljubljana_tower(n, depth)
    con = Stabilizing(depth, margin)

    def halves_pattern():
        r = delta_218(lw.tower, lw.thread, lw.lifts, solve=False)
        return all(lw.actual(i + 1, h) == {lab: (1 if lab[0] == i + 1 and lab[1] > lab[0] else 0)
                                           for lab in lw.tower.labels[i]}
                   for i, h in enumerate(r.halves))

    def doubled():
        r = delta_218(lw.tower, lw.thread, lw.lifts, solve=False)
        return check_solution(LimSystem(lw.tower, r.differences, con), lw.lifts, 1)

    claims = [
        Claim("delta_218 halves", True, "halves equal 1 exactly at positions (i, k), k > i", halves_pattern),
        Claim("system_solve doubled", True, "the doubled system is solved by the reference lifts", doubled),
        Claim("system_solve halved", "no-solution-within-class", "the halved system has no stabilizing solution",
              lambda: delta_218(lw.tower, lw.thread, lw.lifts, constraint=con).verdict.status),
    ]
    return AtlasEntry("ljubljana", {"n": n, "depth": depth, "margin": margin},
                      {"tower": lw.tower, "thread": lw.thread, "lifts": lw.lifts}, claims)


def _entry_inverse_telescope(n: int = 2, k: int = 1) -> AtlasEntry:
    from .complexes import induced_map

    maps = [degree_map(n, 3 * 2 ** (j - 1), 2) for j in range(k, 0, -1)]

    def composite_degree():
        total = 1
        for f in maps:
            total *= int(induced_map(f, n - 1).matrix.a[0, 0])
        return abs(total)

    def bonding_mod2():
        h = induced_map(inverse_telescope_bonding(n, k), n, "Z2")
        return "zero" if h.is_zero() else "nonzero"

    def bonding_mod2_one_hole():
        h = induced_map(inverse_telescope_bonding(n, k, [tuple(range(n + 1))]), n, "Z2")
        return "zero" if h.is_zero() else "nonzero"

    claims = [
        Claim("composite bonding degree", 2 ** k, "the deep sphere maps with degree 2^k onto the first one",
              composite_degree),
        Claim("bonding map on H^n mod 2", "zero",
              "every point class becomes divisible by two one level deeper, so H^n of the limit vanishes mod 2",
              bonding_mod2),
        Claim("bonding map on H^n mod 2, one simplex modified", "nonzero",
              "classes of the unmodified simplices survive", bonding_mod2_one_hole),
    ]
    return AtlasEntry("inverse-telescope-flores", {"n": n, "k": k}, {"complex": example_2_6_stage(n, k)}, claims,
                      [CONE_STAND_IN, "stage k+1 maps to stage k by collapsing the deepest cylinder to the cone point"])


def _entry_pinched(n: int = 2, p: int = 3, k: int = 2) -> AtlasEntry:
    Z = example_2_12_stage(n, p, k)
    K = flores_skeleton(n)
    claims = [
        Claim("cohomology H^n", _group(K.chain_complex(), n).describe(), "the inserted piece is contractible",
              lambda: _group(Z.chain_complex(), n).describe()),
        Claim("cohomology H^1", "Z", "identifying two points creates one loop",
              lambda: _group(Z.chain_complex(), 1).describe()),
    ]
    return AtlasEntry("pinched-flores", {"n": n, "p": p, "k": k}, {"complex": Z}, claims, [CONE_STAND_IN])


def _entry_wedge(n: int = 2, p: int = 2, k: int = 3) -> AtlasEntry:
    ws = wedge_double_stage(n, p, k)

    def tower_shape():
        t = ws.tower()
        ok = all(g.same_type(FgAbGroup.free(2)) for g in t.groups)
        from .exactalg import snf
        return ok and all(tuple(snf(f.matrix.a).invariant_factors) == (p, p) for f in t.maps)

    claims = [Claim("tower_from_filtration", True, "rank-two tower with bonding of type diag(p, p)", tower_shape)]
    return AtlasEntry("wedge-sklyarenko", {"n": n, "p": p, "k": k}, {"complex": ws.complex, "filtration": ws.filtration},
                      claims, [CONE_STAND_IN])


def _entry_akhmetiev(n: int = 2, i: int = 1) -> AtlasEntry:
    st = akhmetiev_stage(n, i)
    top = FgAbGroup(i + (1 if n % 2 else 0), () if n % 2 else (2,))

    def top_group():
        return _group(st.complex.chain_complex(), n)

    claims = [
        Claim("cohomology H^n", top.describe(), "i spheres plus a projective space",
              lambda: top_group().describe()),
        Claim("cohomology H^0", FgAbGroup.free(i + 1).describe(), "i + 1 components",
              lambda: _group(st.complex.chain_complex(), 0).describe()),
    ]
    return AtlasEntry("akhmetiev", {"n": n, "i": i}, {"complex": st.complex, "bonding": st.bonding}, claims)
