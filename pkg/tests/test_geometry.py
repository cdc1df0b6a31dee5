from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qnnent.errors import ConfigurationError, InputError
from qnnent.geometry import LatticeGeometry, epsilon_ball, validate_k_local
from qnnent.networks import Locality, RbmSpec, random_network


def test_distance_examples():
    assert LatticeGeometry.chain(8, "periodic").distance(0, 7) == 1
    assert LatticeGeometry.chain(8, "open").distance(0, 7) == 7
    g = LatticeGeometry.square(3, 3)
    assert g.distance(g.site_id(0, 0), g.site_id(2, 2)) == 1


def test_distance_rejects_unknown_site():
    with pytest.raises(InputError):
        LatticeGeometry.chain(4).distance(0, 4)


def test_epsilon_ball_examples():
    g = LatticeGeometry.chain(9, "open")
    assert epsilon_ball(g, 4, 1).members == {3, 4, 5}
    assert epsilon_ball(g, 0, 1).members == {0, 1}
    sq = LatticeGeometry.square(3, 3)
    assert epsilon_ball(sq, sq.site_id(1, 1), 1).members == set(range(9))
    with pytest.raises(InputError):
        epsilon_ball(g, 0, -0.5)


def test_edge_lattice_stencils_have_radius_half():
    g = LatticeGeometry.torus_edges(3)
    h = g.site_id(1, 1, direction=0)
    v = g.site_id(1, 1, direction=1)
    assert g.distance(h, v) == 0.5
    with pytest.raises(InputError):
        LatticeGeometry("edge", (3, 3), "open")


def test_validate_k_local_examples():
    g = LatticeGeometry.chain(9)
    rbm = random_network("rbm", 9, Locality.k_local(1, 3), seed=0, geometry=g)
    rep = validate_k_local(rbm, g, 1)
    assert rep.is_local and rep.K == 3

    dense = random_network("rbm", 6, Locality.dense(), seed=0, m=6)
    assert not validate_k_local(dense, LatticeGeometry.chain(6), 1).is_local

    zero = RbmSpec(4, 4, W=np.zeros((4, 4)))
    rep = validate_k_local(zero, LatticeGeometry.chain(4), 0)
    assert rep.is_local and rep.K == 0


def test_hidden_neuron_without_position_is_configuration_error():
    spec = RbmSpec(3, 5, W=np.ones((3, 5)))
    with pytest.raises(ConfigurationError):
        validate_k_local(spec, LatticeGeometry.chain(3), 1)


def test_relabeling_hidden_neurons_keeps_report():
    g = LatticeGeometry.chain(8)
    spec = random_network("rbm", 8, Locality.k_local(1, 3), seed=4, geometry=g)
    perm = np.random.default_rng(1).permutation(8)
    relabeled = RbmSpec(8, 8, spec.a, spec.b[perm], spec.W[:, perm], spec.mask[:, perm],
                        hidden_positions=tuple(int(p) for p in np.array(spec.hidden_positions)[perm]))
    a, b = validate_k_local(spec, g, 1), validate_k_local(relabeled, g, 1)
    assert (a.is_local, a.K, len(a.violations)) == (b.is_local, b.K, len(b.violations))


def test_geometry_dict_round_trip():
    for g in (LatticeGeometry.chain(5, "open"), LatticeGeometry.torus_edges(2, 3)):
        assert LatticeGeometry.from_dict(g.to_dict()) == g


geometries = st.sampled_from([
    LatticeGeometry.chain(7, "open"),
    LatticeGeometry.chain(7, "periodic"),
    LatticeGeometry.square(3, 4, boundary="open"),
    LatticeGeometry.square(4, 4),
    LatticeGeometry.torus_edges(3),
])


@settings(max_examples=60, deadline=None)
@given(geometries, st.data())
def test_distance_is_a_metric(g, data):
    site = st.integers(0, g.n_sites - 1)
    a, b, c = data.draw(site), data.draw(site), data.draw(site)
    assert g.distance(a, b) == g.distance(b, a)
    assert (g.distance(a, b) == 0) == (a == b)
    assert g.distance(a, c) <= g.distance(a, b) + g.distance(b, c)


@settings(max_examples=40, deadline=None)
@given(geometries, st.data(), st.floats(0, 3), st.floats(0, 3))
def test_epsilon_ball_is_monotone(g, data, e1, e2):
    center = data.draw(st.integers(0, g.n_sites - 1))
    lo, hi = sorted((e1, e2))
    small, big = epsilon_ball(g, center, lo), epsilon_ball(g, center, hi)
    assert center in small.members
    assert small.members <= big.members
    assert all(g.distance(center, m) <= hi for m in big.members)
