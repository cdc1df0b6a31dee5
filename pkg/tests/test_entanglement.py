from __future__ import annotations

import itertools
import json
import math

import numpy as np
import pytest

from oracles import reduced_density_matrix, renyi_from_rho
from qnnent.entanglement import (
    CSV_FIELDS,
    RegionFamily,
    area_law_check,
    boundary_area,
    entropy_sweep,
    make_region,
    make_regions,
    parse_region_spec,
    rectangle_regions,
    topological_entropy,
    toric_fan_partition,
)
from qnnent.errors import ConfigurationError, InputError, PreconditionError
from qnnent.geometry import LatticeGeometry
from qnnent.networks import Locality, random_network, rbm_to_quasi_product
from qnnent.quasi_product import (
    build_cluster_state_1d,
    build_graph_state,
    toric_cover,
    toric_quasi_product_state,
)
from qnnent.state import DenseState, normalize

LN2 = math.log(2)


def cluster(n: int) -> DenseState:
    return normalize(build_cluster_state_1d(n).to_state())


def test_make_regions_examples():
    chain = LatticeGeometry.chain(8)
    regions = make_regions(chain, RegionFamily("contiguous-1d"))
    assert [r.volume for r in regions] == list(range(1, 8))
    sq = LatticeGeometry.square(3, 3)
    block = make_regions(sq, RegionFamily("rectangle-2d", width=2, height=2, corners=((0, 0),)))
    assert block[0].volume == 4 and block[0].area == 4
    with pytest.raises(InputError):
        make_region(chain, range(8))
    with pytest.raises(InputError):
        make_region(chain, [])
    with pytest.raises(InputError):
        make_regions(chain, RegionFamily("contiguous-1d", lengths=(8,)))


def test_regions_are_sorted_and_deterministic():
    g = LatticeGeometry.square(4, 3, boundary="open")
    a = make_regions(g, RegionFamily("rectangle-2d", width=2, height=1))
    b = make_regions(g, RegionFamily("rectangle-2d", width=2, height=1))
    assert [r.sites for r in a] == [r.sites for r in b]
    assert [r.sites for r in a] == sorted(r.sites for r in a)
    assert all(0 < r.volume < g.n_sites for r in rectangle_regions(g))


def test_region_spec_parsing():
    g = LatticeGeometry.square(3, 3)
    assert parse_region_spec("contiguous", g).kind == "contiguous-1d"
    fam = parse_region_spec("rect:2x1", g)
    assert (fam.width, fam.height) == (2, 1)
    with pytest.raises(InputError):
        parse_region_spec("rect:2by1", g)


def test_boundary_area_on_chain():
    assert boundary_area(LatticeGeometry.chain(8), [2, 3, 4]) == 2
    assert boundary_area(LatticeGeometry.chain(8, "open"), [0, 1, 2]) == 1


def test_entropy_sweep_examples():
    product = DenseState(4, np.eye(16)[0], normalized=True)
    rep = entropy_sweep(product, make_regions(LatticeGeometry.chain(4), RegionFamily("contiguous-1d")), [1, 2])
    assert all(r.entropy_nats == 0 for r in rep.rows)

    rep = entropy_sweep(cluster(8), make_regions(LatticeGeometry.chain(8),
                                                 RegionFamily("contiguous-1d", lengths=tuple(range(2, 7)))), [2])
    assert np.allclose([r.entropy_nats for r in rep.rows], 2 * LN2, atol=1e-12)
    with pytest.raises(PreconditionError):
        entropy_sweep(DenseState(2, [1, 1, 0, 0]), [make_region(LatticeGeometry.chain(2), [0])], [1])


def test_entropy_grows_with_region_for_dense_rbms():
    means = np.mean([
        [r.entropy_nats for r in entropy_sweep(
            random_network("rbm", 12, Locality.dense(), s).to_state(),
            make_regions(LatticeGeometry.chain(12), RegionFamily("contiguous-1d", lengths=tuple(range(1, 7)))),
            [2]).rows]
        for s in range(20)], axis=0)
    assert np.all(np.diff(means) > 0)


def test_report_formats():
    g = LatticeGeometry.chain(6)
    cover = build_cluster_state_1d(6)
    rep = entropy_sweep(normalize(cover.to_state()), make_regions(g, RegionFamily("contiguous-1d")), [1], cover)
    lines = rep.to_csv().splitlines()
    assert lines[0] == ",".join(CSV_FIELDS)
    assert len(lines) == 1 + 5
    assert rep.all_bounds_ok and not rep.failures()
    rows = json.loads(rep.to_json())
    assert set(rows[0]) == set(CSV_FIELDS)


def test_entropy_sweep_matches_partial_trace_oracle():
    rng = np.random.default_rng(8)
    n = 6
    state = normalize(DenseState(n, rng.normal(size=2**n) + 1j * rng.normal(size=2**n)))
    g = LatticeGeometry.chain(n)
    regions = make_regions(g, RegionFamily("custom", sites=((0,), (1, 4), (0, 2, 3), (1, 2, 3, 5))))
    rep = entropy_sweep(state, regions, [0.5, 1, 2, 3])
    for row, (region, alpha) in zip(rep.rows, itertools.product(regions, [0.5, 1, 2, 3])):
        rho = reduced_density_matrix(state.amplitudes, n, list(region.sites))
        assert row.entropy_nats == pytest.approx(renyi_from_rho(rho, alpha), abs=1e-8)


def test_area_law_check_builtin_constructions():
    alphas = [0.5, 1, 2, 3]
    n = 8
    g = LatticeGeometry.chain(n)
    regions = make_regions(g, RegionFamily("contiguous-1d"))
    for cover in (build_cluster_state_1d(n), build_graph_state([(i, (i + 1) % n) for i in range(n)], n)):
        assert area_law_check(normalize(cover.to_state()), cover, regions, alphas).passed
    tg = LatticeGeometry.torus_edges(3)
    rep = area_law_check(toric_quasi_product_state(3), toric_cover(3), rectangle_regions(tg), [1, 2])
    assert rep.passed and rep.max_R > 0


def test_area_law_check_local_and_dense_rbm():
    g = LatticeGeometry.chain(10)
    regions = make_regions(g, RegionFamily("contiguous-1d"))
    spec = random_network("rbm", 10, Locality.k_local(1, 3), seed=2)
    assert area_law_check(spec.to_state(), rbm_to_quasi_product(spec), regions, [0.5, 1, 2]).passed
    dense = random_network("rbm", 10, Locality.dense(), seed=2)
    rep = area_law_check(dense.to_state(), rbm_to_quasi_product(dense), regions, [2])
    assert rep.passed and all(r.bound_vacuous for r in rep.rows)
    with pytest.raises(ConfigurationError):
        area_law_check(spec.to_state(), None, regions, [1])


def test_plateau_for_cluster_state():
    n = 10
    rep = entropy_sweep(cluster(n), make_regions(LatticeGeometry.chain(n), RegionFamily(
        "contiguous-1d", lengths=tuple(range(3, 8)))), [0.5, 1, 2])
    assert np.ptp([r.entropy_nats for r in rep.rows]) < 1e-9


def test_topological_entropy_examples():
    product = DenseState(6, np.eye(64)[0], normalized=True)
    assert topological_entropy(product, [0], [1], [2]) == 0

    a, b, c = toric_fan_partition(3)
    s_top = topological_entropy(toric_quasi_product_state(3), a, b, c)
    assert s_top == pytest.approx(LN2, abs=1e-9)

    path = normalize(build_graph_state([(i, i + 1) for i in range(7)], 8).to_state())
    assert topological_entropy(path, [1, 2], [3, 4], [5, 6]) == pytest.approx(0, abs=1e-12)

    with pytest.raises(InputError):
        topological_entropy(product, [0, 1], [1], [2])
    with pytest.raises(InputError):
        topological_entropy(product, [], [1], [2])


def test_topological_entropy_is_symmetric_in_the_three_regions():
    state = toric_quasi_product_state(3)
    parts = toric_fan_partition(3)
    values = [topological_entropy(state, *perm) for perm in itertools.permutations(parts)]
    assert np.ptp(values) < 1e-9


def test_fan_partition_shape():
    a, b, c = toric_fan_partition(3)
    assert not (set(a) & set(b) or set(b) & set(c) or set(a) & set(c))
    assert len(a) + len(b) + len(c) == 12
    with pytest.raises(InputError):
        toric_fan_partition(2)


@pytest.mark.xfail(strict=True, reason="random local RBM entropies vary with region length; see ledger")
def test_plateau_for_random_local_rbm():
    n = 10
    spec = random_network("rbm", n, Locality.k_local(1, 3), seed=0)
    rep = entropy_sweep(spec.to_state(), make_regions(LatticeGeometry.chain(n), RegionFamily(
        "contiguous-1d", lengths=tuple(range(3, 8)))), [2])
    assert np.ptp([r.entropy_nats for r in rep.rows]) < 1e-9
