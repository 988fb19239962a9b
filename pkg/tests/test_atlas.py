import pytest

from vkampen.atlas import (
    akhmetiev_stage,
    atlas_names,
    build,
    collapse_to_simplex_boundary,
    inverse_telescope_bonding,
    example_2_6_stage,
    example_2_12_stage,
    flores_skeleton,
    ljubljana_tower,
    padic_tree_stage,
    projective_cover,
    sklyarenko_stage,
    wedge_double_stage,
)
from vkampen.complexes import induced_map
from vkampen.exactalg import FgAbGroup
from vkampen.towers import lim_lim1


def groups(K, ring="Z"):
    cx = K.chain_complex(ring)
    return [cx.cohomology(d).group.describe() for d in range(K.dim + 1)]


GOLDEN = [
    ("flores", {"n": 1}), ("flores", {"n": 2}),
    ("padic-tree", {"p": 2, "k": 1}), ("padic-tree", {"p": 3, "k": 2}),
    ("sklyarenko", {"n": 2, "p": 2, "k": 4}), ("sklyarenko", {"n": 3, "p": 3, "k": 3}),
    ("sklyarenko", {"n": 2, "p": 1, "k": 3}),
    ("ljubljana", {"depth": 4, "margin": 1}), ("ljubljana", {"depth": 6, "margin": 2}),
    ("inverse-telescope-flores", {"n": 2, "k": 1}),
    ("pinched-flores", {"n": 2, "p": 3, "k": 2}),
    ("wedge-sklyarenko", {"n": 2, "p": 2, "k": 3}), ("wedge-sklyarenko", {"n": 2, "p": 3, "k": 3}),
    ("akhmetiev", {"n": 1, "i": 2}), ("akhmetiev", {"n": 2, "i": 1}), ("akhmetiev", {"n": 3, "i": 1}),
]


@pytest.mark.parametrize("name, params", GOLDEN)
def test_every_claim_holds(name, params):
    entry = build(name, **params)
    for result in entry.run_claims():
        assert result["ok"], result
        assert result["reference"]


def test_registry():
    assert set(atlas_names()) == {name for name, _ in GOLDEN}
    with pytest.raises(ValueError):
        build("nonexistent")


def test_builders_are_deterministic():
    a, b = sklyarenko_stage(2, 2, 3), sklyarenko_stage(2, 2, 3)
    assert a.complex.to_json() == b.complex.to_json()
    assert example_2_12_stage(2, 3, 2).to_json() == example_2_12_stage(2, 3, 2).to_json()


def test_flores_counts():
    assert flores_skeleton(1).f_vector() == [5, 10]
    assert flores_skeleton(2).f_vector() == [7, 21, 35]


def test_padic_first_stage():
    X, bond = padic_tree_stage(2, 1)
    assert X.f_vector() == [3, 2]
    assert set(bond.vertex_images.values()) == {(0, 0)}
    X, bond = padic_tree_stage(3, 3)
    assert groups(X) == ["Z", "0"]
    assert X.euler_characteristic() == 1
    assert bond.target.f_vector() == padic_tree_stage(3, 2)[0].f_vector()


def test_collapse_has_degree_one():
    for n, m in ((2, 6), (2, 12), (3, 6)):
        g = collapse_to_simplex_boundary(n, m, tuple(range(10, 11 + n)))
        assert abs(int(induced_map(g, n - 1).matrix.a[0, 0])) == 1


def test_sklyarenko_identity_variant_holds():
    t = sklyarenko_stage(2, 1, 3).tower()
    assert lim_lim1(t).ml.status == "holds"


def test_sklyarenko_stage_is_contractible():
    assert groups(sklyarenko_stage(2, 2, 3).complex) == ["Z", "0", "0"]


def test_ljubljana_depth_four_layout():
    lw = ljubljana_tower(1, 4)
    t = lw.tower
    assert [g.ngens for g in t.groups] == [10, 7, 5, 4]
    assert t.labels[1] == [(1, 1), (2, 2), (2, 3), (2, 4), (3, 3), (3, 4), (4, 4)]
    # bonding G_2 -> G_1 is the coordinate inclusion
    A = t.maps[0].matrix.a
    assert A.shape == (10, 7) and sum(A.ravel()) == 7
    assert lw.actual(1, lw.lifts[0])[(1, 1)] == 2 and lw.actual(1, lw.thread[0])[(1, 2)] == 0


def test_inverse_telescope_stage_structure():
    X = example_2_6_stage(2, 1, [(0, 1, 2)])
    assert groups(X) == ["Z", "0", "Z^20"]
    # a coned inverse telescope is a Moore space: the integral class becomes torsion
    Y = example_2_6_stage(2, 1, [(0, 1, 2), (0, 1, 3), (0, 1, 4), (0, 1, 5), (0, 1, 6)])
    assert groups(Y, "Z2")[1] == "Z/2"
    f = inverse_telescope_bonding(2, 1, [(0, 1, 2)])
    assert f.source.f_vector()[0] > f.target.f_vector()[0]
    with pytest.raises(ValueError):
        example_2_6_stage(1, 1)


def test_pinched_stage():
    Z = example_2_12_stage(2, 3, 2)
    g = groups(Z)
    assert g[1] == "Z" and g[2] == "Z^20"


def test_wedge_tower():
    t = wedge_double_stage(2, 2, 3).tower()
    assert all(g.same_type(FgAbGroup.free(2)) for g in t.groups)


def test_akhmetiev_stages():
    st = akhmetiev_stage(2, 1)
    assert groups(st.complex) == ["Z^2", "0", "Z/2 + Z"]
    # the bonding map is a double cover on the new sphere
    base = st.cover.base
    assert len(st.cover.cover.facets()) == 2 * len(base.facets())
    assert abs(int(induced_map(st.cover.projection, 2, "Z2").matrix.a[0, 0])) % 2 == 0
    assert akhmetiev_stage(2, 0).bonding is None
    rp3 = projective_cover(3).base
    assert groups(rp3) == ["Z", "0", "Z/2", "Z"]
    with pytest.raises(ValueError):
        akhmetiev_stage(4, 1)
