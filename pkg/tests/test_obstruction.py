import itertools
import json
import random

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vkampen.complexes import (
    CohomologyClass,
    SimplicialComplex,
    SimplicialMap,
    boundary_of_simplex,
    complete_bipartite,
    complete_graph,
    is_zero,
    random_complex,
    simplex,
    simplex_skeleton,
)
from vkampen.obstruction import (
    DegreeOutOfRange,
    GenericityExhausted,
    bockstein_route,
    calibrate_sign,
    char_class,
    characteristic_profile,
    classify,
    coindex,
    completeness_label,
    deleted_product,
    dimension_range,
    embeddability_report,
    general_position_placement,
    intersection_sign,
    restricted_vanishing,
    sigma_subcomplex,
    vk_class_geometric,
)


def _small_complex(seed, max_dim=2):
    rng = random.Random(seed)
    return random_complex(rng, rng.randint(3, 7), rng.randint(1, max_dim), rng.uniform(0.3, 0.8))


@given(st.integers(0, 10 ** 6))
def test_deleted_product_invariants(seed):
    dp = deleted_product(_small_complex(seed))
    assert dp.check_d_squared()
    assert dp.check_involution()
    assert dp.is_free()
    for d in range(dp.top + 1):
        assert dp.quotient(1).check_d_squared() and dp.quotient(-1).check_d_squared()


@given(st.integers(0, 10 ** 6))
def test_classifying_map_is_equivariant_chain_map(seed):
    dp = deleted_product(_small_complex(seed))
    assert classify(dp).verify()
    assert classify(dp, random.Random(seed)).verify()


@given(st.integers(0, 10 ** 6))
def test_pullback_class_independent_of_choices(seed):
    dp = deleted_product(_small_complex(seed))
    rng = random.Random(seed)
    a, b = classify(dp, rng), classify(dp, rng)
    for m in range(dp.top + 1):
        for ring in ("Z", "Z2"):
            ca, cb = char_class(dp, m, ring, a), char_class(dp, m, ring, b)
            assert is_zero(ca - cb).zero


@given(st.integers(0, 10 ** 6))
def test_monotone_coindex(seed):
    profile = characteristic_profile(_small_complex(seed))
    # once a power vanishes every higher power vanishes
    first_zero = next((m for m, nz in enumerate(profile) if not nz), len(profile))
    assert not any(profile[first_zero:])


def _equivariant_value(dp, klass, d, i, eps):
    pos = dp.rep_positions(d)
    if i in pos:
        return klass.representative[pos[i]]
    j, s = dp.partner(d, i)
    return s * eps * klass.representative[pos[j]]


@given(st.integers(0, 10 ** 6))
def test_subcomplex_naturality(seed):
    rng = random.Random(seed)
    K = _small_complex(seed)
    keep = sorted(rng.sample(list(K.vertices), max(2, len(K.vertices) - 1)))
    L = K.induced_subcomplex(keep)
    dk, dl = deleted_product(K), deleted_product(L)
    for m in range(dl.top + 1):
        eps = -1 if m % 2 else 1
        ck, cl = char_class(dk, m), char_class(dl, m)
        where = {dk.label(m, i): i for i in range(dk.count(m))}
        restricted = tuple(_equivariant_value(dk, ck, m, where[dl.label(m, i)], eps) for i in dl.reps(m))
        assert is_zero(CohomologyClass(cl.complex, m, restricted) - cl).zero


@pytest.mark.parametrize("seed", range(40))
def test_graph_obstruction_matches_planarity(seed):
    rng = random.Random(seed)
    n = rng.randint(5, 8)
    K = random_complex(rng, n, 1, rng.uniform(0.4, 0.9))
    if K.dim < 1:
        return
    G = nx.Graph([tuple(K.labels(e)) for e in K.simplices[1]])
    planar, _ = nx.check_planarity(G)
    dp = deleted_product(K)
    if dp.top < 2:
        assert planar
        return
    v = is_zero(char_class(dp, 2))
    assert v.verify()
    assert v.zero == planar


def test_kuratowski_graphs_nonzero():
    for K in (complete_graph(5), complete_bipartite(3, 3)):
        v = is_zero(char_class(deleted_product(K), 2))
        assert not v.zero and v.verify()


def test_flores_and_small_skeleton():
    assert not is_zero(char_class(deleted_product(simplex_skeleton(6, 2)), 4)).zero
    with pytest.raises(DegreeOutOfRange):
        char_class(deleted_product(simplex_skeleton(4, 2)), 4)


@pytest.mark.parametrize("K, expected", [
    (SimplicialComplex([0, 1], [[0], [1]]), 0),
    (boundary_of_simplex(2), 1),
    (boundary_of_simplex(3), 2),
    (boundary_of_simplex(4), 3),
    (complete_graph(5), 2),
])
def test_coindex(K, expected):
    assert coindex(K) == expected


@given(st.integers(0, 10 ** 6))
def test_bockstein_identity(seed):
    dp = deleted_product(_small_complex(seed))
    for m in range(1, dp.top + 1):
        assert is_zero(bockstein_route(dp, m) - char_class(dp, m)).zero


@pytest.mark.parametrize("seed", [1, 2, 3, 20240607])
def test_geometric_route_with_calibrated_sign(seed):
    sign = calibrate_sign(seed)
    assert sign in (1, -1)
    for K in (complete_graph(5), complete_bipartite(3, 3), simplex_skeleton(4, 1)):
        dp = deleted_product(K)
        geo = vk_class_geometric(K, 1, seed, dp)
        assert is_zero(geo - char_class(dp, 2).scaled(sign)).zero


def test_placement_deterministic_and_generic():
    K = complete_graph(5)
    a = general_position_placement(K, 1, seed=7)
    b = general_position_placement(K, 1, seed=7)
    assert a.coords == b.coords
    with pytest.raises(GenericityExhausted):
        general_position_placement(K, 1, seed=7, budget=0)


def test_intersection_sign_is_antisymmetric_for_edges():
    # two crossing segments in the plane
    coords = {0: (0, 0), 1: (2, 2), 2: (0, 2), 3: (2, 0)}
    s, t = (0, 1), (2, 3)
    assert intersection_sign(coords, s, t) == -intersection_sign(coords, t, s) != 0
    coords[3] = (-2, 4)
    assert intersection_sign(coords, s, t) == 0


def test_restriction_examples():
    K5 = complete_graph(5)
    dp = deleted_product(K5)
    klass = char_class(dp, 2)
    _, comp = sigma_subcomplex(dp, SimplicialMap.identity(K5))
    assert restricted_vanishing(klass, dp, comp).zero == is_zero(klass).zero
    _, comp = sigma_subcomplex(dp, SimplicialMap.constant(K5, K5, 0))
    assert all(not c for c in comp)
    assert restricted_vanishing(klass, dp, comp).zero


def test_report_labels_and_json():
    rep = embeddability_report(complete_graph(5), 2)
    j = rep.to_json()
    assert j["verdict"] == "nonzero" and j["completeness_label"] == "necessary-only"
    assert j["hypotheses"] == {"n": 1, "range": "double"}
    assert set(j["route"]) == {"resolution-pullback", "bockstein", "geometric-cocycle"}
    json.dumps(j)
    assert embeddability_report(simplex(3), 6).verdict.zero
    assert embeddability_report(simplex_skeleton(6, 2), 4).verdict.zero is False
    assert dimension_range(3, 6) == "double" and dimension_range(3, 7) == "metastable"
    assert dimension_range(3, 5) == "outside"
    assert completeness_label(3, 6) == "complete" and completeness_label(2, 4) == "necessary-only"
    assert completeness_label(1, 3) == "complete"
