from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import reduced_density_matrix
from qnnent.errors import DegenerateStateError, InputError, PreconditionError, ResourceError
from qnnent.quasi_product import build_cluster_state_1d, cluster_stabilizers, qp_amplitude
from qnnent.state import (
    Alphabet,
    Bipartition,
    DenseState,
    SchmidtSpectrum,
    SpinConfiguration,
    apply_pauli_string,
    dumps_qns,
    evaluate_all,
    expectation,
    loads_qns,
    memory_estimate,
    nats_to_bits,
    normalize,
    numerical_rank,
    read_qns,
    renyi_entropy,
    schmidt,
    write_qns,
)

ALPHAS = (0.5, 1.0, 2.0, 3.0)


def random_state(n: int, seed: int) -> DenseState:
    rng = np.random.default_rng(seed)
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return normalize(DenseState(n, v))


def cluster(n: int) -> DenseState:
    return normalize(build_cluster_state_1d(n).to_state())


def test_configuration_index_convention():
    c = SpinConfiguration.from_values([1, 0, 1], Alphabet.ZERO_ONE)
    assert c.index == 0b101
    pm = SpinConfiguration(3, 0b001, Alphabet.PLUS_MINUS)
    assert pm.values() == (-1, 1, 1)
    assert pm.flipped(0).index == 0


def test_evaluate_all_constant_and_graph():
    assert np.allclose(evaluate_all(lambda c: 1.0, 2).amplitudes, [1, 1, 1, 1])
    graph = evaluate_all(lambda c: (-1) ** (c.bit(0) * c.bit(1)), 2)
    assert np.allclose(graph.amplitudes, [1, 1, 1, -1])
    assert not graph.normalized


def test_evaluate_all_cluster_formula_satisfies_stabilizers():
    cover = build_cluster_state_1d(4)
    state = normalize(evaluate_all(lambda c: qp_amplitude(cover, c), 4, alphabet=cover.alphabet))
    for stab in cluster_stabilizers(4):
        assert abs(expectation(state, stab) - 1) < 1e-10


def test_evaluate_all_is_thread_independent():
    def amp(values):
        return np.exp(1j * values @ np.arange(1, 11)) * (1 + values.sum(axis=1))
    a = evaluate_all(amp, 10, batch=True, threads=1, chunk=64)
    b = evaluate_all(amp, 10, batch=True, threads=4, chunk=64)
    assert a.amplitudes.tobytes() == b.amplitudes.tobytes()


def test_size_limit(monkeypatch):
    monkeypatch.setenv("QNNENT_MAX_SITES", "4")
    with pytest.raises(ResourceError, match="GiB|MiB|KiB|B"):
        evaluate_all(lambda c: 1.0, 5)
    assert "KiB" in memory_estimate(10)


def test_normalize_examples():
    assert np.allclose(normalize(DenseState(2, [2, 0, 0, 0])).amplitudes, [1, 0, 0, 0])
    assert np.allclose(normalize(DenseState(2, [1, 1, 1, 1])).amplitudes, [0.5] * 4)
    with pytest.raises(DegenerateStateError):
        normalize(DenseState(2, np.zeros(4)))


def test_dense_state_validation():
    with pytest.raises(InputError):
        DenseState(2, np.ones(3))
    with pytest.raises(PreconditionError):
        DenseState(1, [1, 1], normalized=True)


def test_pauli_examples():
    s = DenseState(1, [1, 0])
    assert np.allclose(apply_pauli_string(s, [(0, "X")]).amplitudes, [0, 1])
    t = DenseState(1, [0.6, 0.8j])
    assert np.allclose(apply_pauli_string(t, [(0, "Z")]).amplitudes, [0.6, -0.8j])
    assert np.allclose(apply_pauli_string(s, [(0, "Y")]).amplitudes, [0, 1j])
    with pytest.raises(InputError):
        apply_pauli_string(s, [(0, "X"), (0, "Z")])
    st4 = cluster(4)
    out = apply_pauli_string(st4, [(0, "Z"), (1, "X"), (2, "Z")])
    assert abs(np.vdot(st4.amplitudes, out.amplitudes)) ** 2 > 1 - 1e-10


def test_schmidt_examples():
    product = DenseState(2, [1, 0, 0, 0], normalized=True)
    values = schmidt(product, Bipartition(2, (0,))).values
    assert np.allclose(values, [1, 0])  # full SVD spectrum; the zero is exact
    assert numerical_rank(schmidt(product, Bipartition(2, (0,)))) == 1
    cz = DenseState(2, np.array([1, 1, 1, -1]) / 2, normalized=True)
    assert np.allclose(schmidt(cz, Bipartition(2, (0,))).values, [2**-0.5] * 2)
    spec = schmidt(cluster(4), Bipartition(4, (0, 1)))
    assert np.allclose(spec.values, [0.5] * 4)
    assert numerical_rank(spec) == 4
    with pytest.raises(PreconditionError):
        schmidt(DenseState(2, [1, 1, 0, 0]), Bipartition(2, (0,)))


def test_bipartition_validation():
    with pytest.raises(InputError):
        Bipartition(3, ())
    with pytest.raises(InputError):
        Bipartition(3, (0, 1, 2))
    assert Bipartition(4, (2, 0)).complement == (1, 3)


def test_renyi_examples():
    assert renyi_entropy(SchmidtSpectrum(np.array([1.0])), 2) == 0
    bell = SchmidtSpectrum(np.array([2**-0.5, 2**-0.5]))
    for a in ALPHAS:
        assert renyi_entropy(bell, a) == pytest.approx(math.log(2), abs=1e-12)
    skew = SchmidtSpectrum(np.sqrt([0.9, 0.1]))
    expected = -0.9 * math.log(0.9) - 0.1 * math.log(0.1)
    assert renyi_entropy(skew, 1) == pytest.approx(expected, abs=1e-12)
    assert renyi_entropy(skew, 1 + 1e-6) == pytest.approx(expected, abs=1e-5)
    assert renyi_entropy(skew, 1 - 1e-6) == pytest.approx(expected, abs=1e-5)
    assert round(expected, 4) == 0.3251
    assert nats_to_bits(math.log(2)) == pytest.approx(1)
    for bad in (0, -1):
        with pytest.raises(InputError):
            renyi_entropy(bell, bad)


def test_numerical_rank_examples():
    assert numerical_rank(SchmidtSpectrum(np.array([1.0]))) == 1
    assert numerical_rank(SchmidtSpectrum(np.array([0.8, 0.6, 1e-14]))) == 2
    assert numerical_rank(SchmidtSpectrum(np.zeros(3))) == 0


def test_qns_round_trip_is_byte_exact(tmp_path):
    s = random_state(5, 3)
    blob = dumps_qns(s)
    assert blob[:4] == b"QNNS"
    assert len(blob) == 4 + 4 + 4 + 1 + 16 * 32
    back = loads_qns(blob)
    assert back.normalized and dumps_qns(back) == blob
    assert back.amplitudes.tobytes() == s.amplitudes.tobytes()
    path = tmp_path / "s.qns"
    write_qns(s, path)
    assert path.read_bytes() == blob
    assert read_qns(path).amplitudes.tobytes() == s.amplitudes.tobytes()


def test_qns_rejects_corruption():
    blob = dumps_qns(random_state(3, 0))
    for bad in (b"XXXX" + blob[4:], blob[:-3], blob[:4] + (7).to_bytes(4, "little") + blob[8:], b""):
        with pytest.raises(InputError):
            loads_qns(bad)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 7), st.integers(0, 10_000), st.data())
def test_entropy_of_region_equals_complement(n, seed, data):
    s = random_state(n, seed)
    region = data.draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=n - 1, unique=True))
    part = Bipartition(n, tuple(region))
    for a in ALPHAS:
        assert renyi_entropy(schmidt(s, part), a) == pytest.approx(renyi_entropy(schmidt(s, part.swapped()), a),
                                                                  abs=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=12))
def test_renyi_is_monotone_and_capped_by_rank(weights):
    w = np.array(weights)
    if w.sum() <= 1e-6:
        w = np.ones_like(w)
    spec = SchmidtSpectrum(np.sqrt(w / w.sum()))
    vals = [renyi_entropy(spec, a) for a in (0.3, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0)]
    assert all(x >= y - 1e-10 for x, y in zip(vals, vals[1:]))
    cap = math.log(max(numerical_rank(spec), 1))
    assert all(v <= cap + 1e-10 for v in vals)


def test_flat_spectrum_reaches_rank_cap():
    spec = SchmidtSpectrum(np.full(4, 0.5))
    assert renyi_entropy(spec, 2) == pytest.approx(math.log(4))


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 5), st.integers(0, 1000), st.data())
def test_pauli_x_and_z_strings_are_involutions(n, seed, data):
    s = random_state(n, seed)
    sites = data.draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=n, unique=True))
    ops = [(i, data.draw(st.sampled_from("XZ"))) for i in sites]
    twice = apply_pauli_string(apply_pauli_string(s, ops), ops)
    assert np.array_equal(twice.amplitudes, s.amplitudes)


@pytest.mark.parametrize("seed", range(6))
def test_schmidt_matches_explicit_partial_trace(seed):
    n = 2 + seed % 5
    s = random_state(n, seed)
    rng = np.random.default_rng(seed)
    region = sorted(rng.choice(n, size=max(1, n // 2), replace=False).tolist())
    spec = schmidt(s, Bipartition(n, tuple(region)))
    assert (spec.values**2).sum() == pytest.approx(1, abs=1e-9)
    eig = np.sort(np.linalg.eigvalsh(reduced_density_matrix(s.amplitudes, n, region)))[::-1]
    p = np.zeros_like(eig)
    p[: len(spec.values)] = spec.values**2
    assert np.allclose(eig, p[: len(eig)], atol=1e-8)
