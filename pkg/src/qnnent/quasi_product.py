"""Local K-cluster quasi-product states and the worked constructions built on them.

A quasi-product state is a product of cluster factors, each a table over
the configurations of a few sites. Covers are fully materialized so they
can be serialized, compared and re-evaluated exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError
from .geometry import HORIZONTAL, VERTICAL, LatticeGeometry
from .state import (
    Alphabet,
    Bipartition,
    DenseState,
    PauliString,
    SpinConfiguration,
    check_size,
    evaluate_all,
    expectation,
    index_bits,
    normalize,
)

DEFAULT_MAX_K = 12
STABILIZER_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class LocalCluster:
    sites: tuple[int, ...]
    table: np.ndarray

    def __post_init__(self) -> None:
        sites = tuple(int(s) for s in self.sites)
        if len(set(sites)) != len(sites):
            raise InputError(f"cluster sites must be distinct, got {sites}")
        table = np.array(self.table, dtype=np.complex128).reshape(-1)
        if table.shape != (2 ** len(sites),):
            raise InputError(f"cluster on {len(sites)} sites needs {2 ** len(sites)} table entries")
        table.setflags(write=False)
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "table", table)

    @classmethod
    def from_function(cls, sites: Sequence[int], fn, alphabet: Alphabet) -> "LocalCluster":
        """Tabulate ``fn(*values)``; the first site is the least significant table bit."""
        k = len(sites)
        table = [fn(*(int(alphabet.values((idx >> j) & 1)) for j in range(k))) for idx in range(2**k)]
        return cls(tuple(sites), np.asarray(table, dtype=np.complex128))

    def local_index(self, bits: np.ndarray) -> np.ndarray:
        idx = np.zeros(bits.shape[0], dtype=np.int64)
        for j, s in enumerate(self.sites):
            idx |= bits[:, s].astype(np.int64) << j
        return idx


@dataclass(frozen=True, eq=False)
class ClusterCover:
    n_sites: int
    clusters: tuple[LocalCluster, ...]
    alphabet: Alphabet = Alphabet.ZERO_ONE
    max_k: int = DEFAULT_MAX_K

    def __post_init__(self) -> None:
        clusters = tuple(self.clusters)
        object.__setattr__(self, "clusters", clusters)
        covered = set()
        for c in clusters:
            if c.sites and (min(c.sites) < 0 or max(c.sites) >= self.n_sites):
                raise InputError(f"cluster sites {c.sites} outside 0..{self.n_sites - 1}")
            covered.update(c.sites)
        if covered != set(range(self.n_sites)):
            missing = sorted(set(range(self.n_sites)) - covered)
            raise InputError(f"clusters do not cover sites {missing}")
        if self.K > self.max_k:
            raise InputError(f"cluster size {self.K} exceeds bound {self.max_k}")

    @property
    def K(self) -> int:
        return max((len(c.sites) for c in self.clusters), default=0)

    @property
    def M(self) -> int:
        return len(self.clusters)

    def batch_amplitudes(self, bits: np.ndarray) -> np.ndarray:
        """Amplitudes for a ``(rows, n_sites)`` matrix of bits."""
        out = np.ones(bits.shape[0], dtype=np.complex128)
        for c in self.clusters:
            out *= c.table[c.local_index(bits)]
        return out

    def to_state(self, threads: int | None = None) -> DenseState:
        check_size(self.n_sites)
        # tables are indexed by bits, so enumerate in the ZERO_ONE alphabet
        return evaluate_all(self.batch_amplitudes, self.n_sites, alphabet=Alphabet.ZERO_ONE,
                            batch=True, threads=threads)

    def to_json(self, geometry: LatticeGeometry | None = None) -> str:
        doc = {
            "n_sites": self.n_sites,
            "alphabet": self.alphabet.value,
            "clusters": [
                {"sites": list(c.sites), "table_re": c.table.real.tolist(), "table_im": c.table.imag.tolist()}
                for c in self.clusters
            ],
        }
        if geometry is not None:
            doc["lattice"] = geometry.to_dict()
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "ClusterCover":
        doc = json.loads(text)
        return cls.from_dict(doc)

    @classmethod
    def from_dict(cls, doc: dict) -> "ClusterCover":
        try:
            clusters = tuple(
                LocalCluster(tuple(c["sites"]), np.asarray(c["table_re"]) + 1j * np.asarray(c["table_im"]))
                for c in doc["clusters"]
            )
            return cls(int(doc["n_sites"]), clusters, Alphabet(doc["alphabet"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed cover document: {exc}") from exc


def qp_amplitude(cover: ClusterCover, config: SpinConfiguration) -> complex:
    if config.n_sites != cover.n_sites:
        raise InputError(f"configuration has {config.n_sites} sites, cover has {cover.n_sites}")
    if config.alphabet is not cover.alphabet:
        raise InputError(f"alphabet mismatch: {config.alphabet.value} vs {cover.alphabet.value}")
    amp = 1.0 + 0.0j
    for c in cover.clusters:
        idx = sum(config.bit(s) << j for j, s in enumerate(c.sites))
        amp *= c.table[idx]
    return complex(amp)


# -- 1D cluster state ---------------------------------------------------------------


_COS_EIGHTHS = (1.0, math.sqrt(0.5), 0.0, -math.sqrt(0.5), -1.0, -math.sqrt(0.5), 0.0, math.sqrt(0.5))


def cos_quarter_pi(k: int) -> float:
    """Exact ``cos(k * pi / 4)`` for integer k (no rounding residue at the zeros)."""
    return _COS_EIGHTHS[k % 8]


def cluster_factor(s_left: int, s_mid: int, s_right: int) -> float:
    """2 cos((pi + 2 pi s_{k-1} + 3 pi s_k + pi s_{k+1}) / 4) for spins in {+1, -1}."""
    return 2.0 * cos_quarter_pi(1 + 2 * s_left + 3 * s_mid + s_right)


def build_cluster_state_1d(n: int, periodic: bool = True) -> ClusterCover:
    """3-local cover of the periodic cluster state; cluster k sits on (k-1, k, k+1)."""
    if n < 3:
        raise InputError(f"cluster state needs at least 3 sites, got {n}")
    if not periodic:
        raise InputError("only the periodic cluster state is available")
    clusters = [
        LocalCluster.from_function(((k - 1) % n, k, (k + 1) % n), cluster_factor, Alphabet.PLUS_MINUS)
        for k in range(n)
    ]
    return ClusterCover(n, tuple(clusters), Alphabet.PLUS_MINUS)


def cluster_stabilizers(n: int) -> list[list[tuple[int, str]]]:
    return [[((k - 1) % n, "Z"), (k, "X"), ((k + 1) % n, "Z")] for k in range(n)]


# -- graph states -------------------------------------------------------------------------


def build_graph_state(edges: Iterable[tuple[int, int]], n: int) -> ClusterCover:
    edges = [(int(i), int(j)) for i, j in edges]
    clusters = []
    touched = set()
    edge_table = np.array([1, 1, 1, -1], dtype=np.complex128) / math.sqrt(2)
    for i, j in edges:
        if i == j:
            raise InputError(f"self-loop on vertex {i}")
        if not (0 <= i < n and 0 <= j < n):
            raise InputError(f"edge ({i}, {j}) references a vertex outside 0..{n - 1}")
        clusters.append(LocalCluster((i, j), edge_table))
        touched.update((i, j))
    for v in range(n):
        if v not in touched:
            clusters.append(LocalCluster((v,), np.ones(2)))
    return ClusterCover(n, tuple(clusters), Alphabet.ZERO_ONE)


def graph_stabilizers(edges: Iterable[tuple[int, int]], n: int) -> list[list[tuple[int, str]]]:
    """X on each vertex times Z on its neighbours."""
    nbrs: dict[int, set[int]] = {v: set() for v in range(n)}
    for i, j in edges:
        nbrs[i].add(j)
        nbrs[j].add(i)
    return [[(v, "X")] + [(u, "Z") for u in sorted(nbrs[v])] for v in range(n)]


# -- toric code -----------------------------------------------------------------------------


def toric_geometry(L: int) -> LatticeGeometry:
    return LatticeGeometry.torus_edges(L)


def _edge(L: int, x: int, y: int, d: int) -> int:
    return d * L * L + (y % L) * L + (x % L)


def toric_stars(L: int) -> list[tuple[int, ...]]:
    """Edges touching each vertex ``(x, y)``, vertex id ``y * L + x``."""
    return [
        (_edge(L, x, y, HORIZONTAL), _edge(L, x - 1, y, HORIZONTAL), _edge(L, x, y, VERTICAL), _edge(L, x, y - 1, VERTICAL))
        for y in range(L) for x in range(L)
    ]


def toric_plaquettes(L: int) -> list[tuple[int, ...]]:
    """Edges bounding the face whose lower-left corner is vertex ``(x, y)``."""
    return [
        (_edge(L, x, y, HORIZONTAL), _edge(L, x, y + 1, HORIZONTAL), _edge(L, x, y, VERTICAL), _edge(L, x + 1, y, VERTICAL))
        for y in range(L) for x in range(L)
    ]


def toric_stabilizers(L: int) -> tuple[list[list[tuple[int, str]]], list[list[tuple[int, str]]]]:
    """(vertex X-stabilizers, plaquette Z-stabilizers)."""
    vertex = [[(e, "X") for e in star] for star in toric_stars(L)]
    plaquette = [[(e, "Z") for e in plaq] for plaq in toric_plaquettes(L)]
    return vertex, plaquette


def _vertex_factor(*s: int) -> float:
    return cos_quarter_pi(2 * sum(s))


def _plaquette_factor(*s: int) -> float:
    return cos_quarter_pi(sum(s))


def toric_cover(L: int) -> ClusterCover:
    """One cluster per vertex star and per plaquette, PLUS_MINUS alphabet."""
    if L < 2:
        raise InputError(f"toric code needs L >= 2, got {L}")
    clusters = [LocalCluster.from_function(star, _vertex_factor, Alphabet.PLUS_MINUS) for star in toric_stars(L)]
    clusters += [LocalCluster.from_function(p, _plaquette_factor, Alphabet.PLUS_MINUS) for p in toric_plaquettes(L)]
    return ClusterCover(2 * L * L, tuple(clusters), Alphabet.PLUS_MINUS)


def winding_parity(bits: np.ndarray, L: int) -> tuple[np.ndarray, np.ndarray]:
    """Winding parities of dual-lattice loop configurations.

    ``w_x`` counts occupied vertical edges in column ``x = 0`` and ``w_y``
    occupied horizontal edges in row ``y = 0``, both mod 2. Vertex flips
    change each count by an even number.
    """
    bits = np.atleast_2d(bits)
    wx = bits[:, [_edge(L, 0, y, VERTICAL) for y in range(L)]].sum(axis=1) % 2
    wy = bits[:, [_edge(L, x, 0, HORIZONTAL) for x in range(L)]].sum(axis=1) % 2
    return wx, wy


def _closed_loop_mask(bits: np.ndarray, L: int) -> np.ndarray:
    ok = np.ones(bits.shape[0], dtype=bool)
    for plaq in toric_plaquettes(L):
        ok &= bits[:, list(plaq)].sum(axis=1) % 2 == 0
    return ok


def _check_sector(sector: tuple[int, int]) -> tuple[int, int]:
    wx, wy = (int(s) for s in sector)
    if wx not in (0, 1) or wy not in (0, 1):
        raise InputError(f"sector must be in {{0,1}}^2, got {sector}")
    return wx, wy


def toric_sector_by_enumeration(L: int, sector: tuple[int, int]) -> DenseState:
    """Equal-weight superposition of closed dual loops with the given winding parity."""
    wx, wy = _check_sector(sector)
    n = 2 * L * L
    check_size(n, "toric code state")
    bits = index_bits(np.arange(2**n), n)
    keep = _closed_loop_mask(bits, L)
    px, py = winding_parity(bits, L)
    keep &= (px == wx) & (py == wy)
    return normalize(DenseState(n, keep.astype(np.complex128)))


def toric_quasi_product_state(L: int) -> DenseState:
    """Normalized ground state straight from :func:`toric_cover` (all four sectors, signed)."""
    check_size(2 * L * L, "toric code state")
    return normalize(toric_cover(L).to_state())


def build_toric_ground(L: int, sector: tuple[int, int] = (0, 0)) -> DenseState:
    """Toric-code logical basis state for winding sector ``(w_x, w_y)``.

    Sector (0, 0) is the quasi-product ground state of :func:`toric_cover`
    restricted to trivial winding; the cover state is itself a signed sum
    of all four sectors. The other sectors come from loop enumeration.
    """
    wx, wy = _check_sector(sector)
    if L < 2:
        raise InputError(f"toric code needs L >= 2, got {L}")
    n = 2 * L * L
    check_size(n, "toric code state")
    if (wx, wy) != (0, 0):
        return toric_sector_by_enumeration(L, (wx, wy))
    cover_state = toric_cover(L).to_state()
    bits = index_bits(np.arange(2**n), n)
    px, py = winding_parity(bits, L)
    amps = np.where((px == 0) & (py == 0), cover_state.amplitudes, 0)
    # fix the global sign so the all-empty configuration is positive
    amps = amps * np.sign(amps[0].real)
    return normalize(DenseState(n, amps))


# -- stabilizer verification -----------------------------------------------------------------


@dataclass(frozen=True)
class StabilizerReport:
    all_pass: bool
    fidelities: tuple[float, ...]
    expectations: tuple[complex, ...] = field(default=())


def verify_stabilizers(state: DenseState, stabilizers: Sequence[PauliString],
                       tol: float = STABILIZER_TOL) -> StabilizerReport:
    """Per-stabilizer fidelity ``|<psi|P|psi>|``; a pass needs ``<psi|P|psi> >= 1 - tol``."""
    exps = tuple(expectation(state, p) for p in stabilizers)
    fids = tuple(abs(e) for e in exps)
    ok = all(e.real >= 1 - tol for e in exps)
    return StabilizerReport(ok, fids, exps)


# -- boundary-rank bookkeeping ------------------------------------------------------------------


@dataclass(frozen=True)
class ClusterClasses:
    internal: tuple[int, ...]
    external: tuple[int, ...]
    boundary: tuple[int, ...]
    boundary_sites: frozenset[int]


def classify_clusters(cover: ClusterCover, part: Bipartition) -> ClusterClasses:
    """Split cluster indices into internal (inside A), external (inside A^c) and boundary."""
    if cover.n_sites != part.n_sites:
        raise InputError("cover and bipartition disagree on the number of sites")
    a = set(part.region_a)
    internal, external, boundary = [], [], []
    bsites: set[int] = set()
    for k, c in enumerate(cover.clusters):
        inside = [s in a for s in c.sites]
        if all(inside):
            internal.append(k)
        elif not any(inside):
            external.append(k)
        else:
            boundary.append(k)
            bsites.update(c.sites)
    return ClusterClasses(tuple(internal), tuple(external), tuple(boundary), frozenset(bsites))


@dataclass(frozen=True)
class RankBound:
    log2: int

    @property
    def value(self) -> int:
        return 2**self.log2


def rank_bound(cover: ClusterCover, part: Bipartition) -> RankBound:
    """Schmidt-rank ceiling ``2**|B|`` with B the sites of boundary clusters."""
    return RankBound(len(classify_clusters(cover, part).boundary_sites))
