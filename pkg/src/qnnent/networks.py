"""Complex-weight RBM, feed-forward and two-hidden-layer DBM wavefunctions.

Weight matrices are stored ``(n_from, n_to)``: ``W_vh[i, j]`` couples
visible ``i`` to shallow hidden ``j`` and ``W_hg[k, j]`` couples deep
hidden ``k`` to shallow hidden ``j``. Every matrix carries a boolean mask;
masked-out entries are forced to zero and a zero weight means no
connection.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, InputError, ResourceError
from .geometry import LatticeGeometry, resolve_positions
from .quasi_product import ClusterCover, LocalCluster
from .state import (
    Alphabet,
    Bipartition,
    DenseState,
    SpinConfiguration,
    check_size,
    index_bits,
    normalize,
    state_from_log_amplitudes,
)

DEFAULT_MAX_DEEP = 20
OVERFLOW_EXPONENT = 300.0


# -- numerics ------------------------------------------------------------------------


def log_2cosh(theta: np.ndarray) -> np.ndarray:
    """``log(2 cosh theta)`` for complex theta without overflow."""
    theta = np.asarray(theta, dtype=np.complex128)
    sign = np.where(theta.real >= 0, 1.0, -1.0)
    t = sign * theta
    with np.errstate(divide="ignore"):
        return t + np.log1p(np.exp(-2.0 * t))


def log_1pexp(theta: np.ndarray) -> np.ndarray:
    """``log(1 + exp(theta))`` for complex theta without overflow."""
    theta = np.asarray(theta, dtype=np.complex128)
    pos = theta.real > 0
    with np.errstate(divide="ignore"):
        return np.where(pos, theta + np.log1p(np.exp(-np.where(pos, theta, 0))),
                        np.log1p(np.exp(np.where(pos, 0, theta))))


def log_gamma(theta: np.ndarray, hidden: Alphabet) -> np.ndarray:
    return log_2cosh(theta) if hidden is Alphabet.PLUS_MINUS else log_1pexp(theta)


def gamma(theta: np.ndarray, hidden: Alphabet) -> np.ndarray:
    """Hidden unit summed out: 2 cosh(theta) for +-1 units, 1 + exp(theta) for 0/1 units."""
    theta = np.asarray(theta, dtype=np.complex128)
    return 2.0 * np.cosh(theta) if hidden is Alphabet.PLUS_MINUS else 1.0 + np.exp(theta)


def logsumexp_complex(x: np.ndarray, axis: int = -1) -> np.ndarray:
    """Complex log-sum-exp; rows whose terms are all ``-inf`` give ``-inf``."""
    re = np.where(np.isfinite(x.real), x.real, -np.inf)
    shift = re.max(axis=axis, keepdims=True)
    shift = np.where(np.isfinite(shift), shift, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(np.isfinite(x.real), np.exp(x - shift), 0)
        total = terms.sum(axis=axis)
        return np.log(total) + np.squeeze(shift, axis=axis)


def _masked(w, mask, shape, what: str) -> tuple[np.ndarray, np.ndarray]:
    w = np.array(w, dtype=np.complex128).reshape(shape) if np.size(w) else np.zeros(shape, np.complex128)
    m = np.ones(shape, dtype=bool) if mask is None else np.array(mask, dtype=bool).reshape(shape)
    if w.shape != shape or m.shape != shape:
        raise InputError(f"{what} must have shape {shape}")
    w = np.where(m, w, 0)
    w.setflags(write=False)
    m = m & (w != 0)
    m.setflags(write=False)
    return w, m


def _vector(x, n: int, what: str) -> np.ndarray:
    v = np.zeros(n, np.complex128) if x is None else np.array(x, dtype=np.complex128).reshape(-1)
    if v.shape != (n,):
        raise InputError(f"{what} must have length {n}, got {v.shape}")
    v.setflags(write=False)
    return v


def _values(v: SpinConfiguration | np.ndarray | Sequence[int], n: int, alphabet: Alphabet) -> np.ndarray:
    if isinstance(v, SpinConfiguration):
        if v.n_sites != n:
            raise InputError(f"configuration has {v.n_sites} sites, network has {n} visible units")
        return alphabet.values(index_bits(np.array([v.bits]), n)).astype(np.float64)
    arr = np.atleast_2d(np.asarray(v, dtype=np.float64))
    if arr.shape[1] != n:
        raise InputError(f"expected {n} visible values, got {arr.shape[1]}")
    return arr


def _edges(mask: np.ndarray, la: str, lb: str) -> list[tuple[str, int, str, int]]:
    return [(la, int(i), lb, int(j)) for i, j in zip(*np.nonzero(mask))]


def _log_to_amplitude(log_amp: np.ndarray) -> np.ndarray:
    return np.exp(log_amp)


# -- RBM ---------------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RbmSpec:
    n_visible: int
    n_hidden: int
    a: np.ndarray = None
    b: np.ndarray = None
    W: np.ndarray = None
    mask: np.ndarray | None = None
    hidden_alphabet: Alphabet = Alphabet.PLUS_MINUS
    visible_alphabet: Alphabet = Alphabet.PLUS_MINUS
    hidden_positions: tuple[int | None, ...] | None = None
    geometry: LatticeGeometry | None = None

    def __post_init__(self) -> None:
        n, m = self.n_visible, self.n_hidden
        object.__setattr__(self, "a", _vector(self.a, n, "visible bias"))
        object.__setattr__(self, "b", _vector(self.b, m, "hidden bias"))
        w, mask = _masked(np.zeros((n, m)) if self.W is None else self.W, self.mask, (n, m), "W")
        object.__setattr__(self, "W", w)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "hidden_alphabet", Alphabet(self.hidden_alphabet))
        object.__setattr__(self, "visible_alphabet", Alphabet(self.visible_alphabet))

    kind = "rbm"

    def layer_names(self) -> tuple[str, ...]:
        return ("visible", "hidden")

    def layer_positions(self, name: str, g: LatticeGeometry) -> tuple[int, ...]:
        if name == "visible":
            return resolve_positions(None, self.n_visible, g, name)
        return resolve_positions(self.hidden_positions, self.n_hidden, g, name)

    def connections(self) -> list[tuple[str, int, str, int]]:
        return _edges(self.mask, "visible", "hidden")

    def hidden_support(self, j: int) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.mask[:, j]))

    def batch_log_amplitudes(self, values: np.ndarray) -> np.ndarray:
        theta = self.b + values @ self.W
        return values @ self.a + log_gamma(theta, self.hidden_alphabet).sum(axis=1)

    def to_state(self) -> DenseState:
        return _network_state(self, self.n_visible, self.visible_alphabet)


def rbm_amplitude(spec: RbmSpec, v) -> complex:
    values = _values(v, spec.n_visible, spec.visible_alphabet)
    theta = spec.b + values @ spec.W
    bias = values @ spec.a
    if max(np.abs(theta.real).max(initial=0), np.abs(bias.real).max(initial=0)) <= OVERFLOW_EXPONENT:
        return complex((np.exp(bias) * gamma(theta, spec.hidden_alphabet).prod(axis=1))[0])
    return complex(_log_to_amplitude(spec.batch_log_amplitudes(values))[0])


def rbm_to_quasi_product(spec: RbmSpec) -> ClusterCover:
    """One cluster per connected hidden unit plus 1-site clusters for visible biases.

    Sites never touched by a hidden unit or bias get constant clusters;
    the constant factor of an unconnected hidden unit is folded into the
    first cluster.
    """
    alphabet = spec.visible_alphabet
    clusters: list[LocalCluster] = []
    scalar = 1.0 + 0.0j
    for j in range(spec.n_hidden):
        sites = spec.hidden_support(j)
        if not sites:
            scalar *= complex(gamma(spec.b[j], spec.hidden_alphabet))
            continue
        k = len(sites)
        local = alphabet.values(index_bits(np.arange(2**k), k)).astype(np.float64)
        theta = spec.b[j] + local @ spec.W[list(sites), j]
        clusters.append(LocalCluster(sites, gamma(theta, spec.hidden_alphabet)))
    covered = {s for c in clusters for s in c.sites}
    for i in range(spec.n_visible):
        if spec.a[i] != 0:
            vals = alphabet.values(np.array([0, 1]))
            clusters.append(LocalCluster((i,), np.exp(spec.a[i] * vals)))
            covered.add(i)
    for i in range(spec.n_visible):
        if i not in covered:
            clusters.append(LocalCluster((i,), np.ones(2)))
    if scalar != 1:
        first = clusters[0]
        clusters[0] = LocalCluster(first.sites, first.table * scalar)
    return ClusterCover(spec.n_visible, tuple(clusters), alphabet, max_k=max(spec.n_visible, 1))


# -- feed-forward ------------------------------------------------------------------------

ACTIVATIONS = ("cos", "cosh", "exp", "tanh", "polynomial", "identity")


@dataclass(frozen=True)
class Activation:
    name: str
    coeffs: tuple[complex, ...] = ()

    def __post_init__(self) -> None:
        if self.name not in ACTIVATIONS:
            raise ConfigurationError(f"unknown activation {self.name!r}; allowed: {', '.join(ACTIVATIONS)}")
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))
        if self.name == "polynomial" and not self.coeffs:
            raise ConfigurationError("polynomial activation needs coefficients")

    def __call__(self, z: np.ndarray) -> np.ndarray:
        if self.name == "cos":
            return np.cos(z)
        if self.name == "cosh":
            return np.cosh(z)
        if self.name == "exp":
            return np.exp(z)
        if self.name == "tanh":
            return np.tanh(z)
        if self.name == "identity":
            return z
        return np.polynomial.polynomial.polyval(z, np.array(self.coeffs))

    def to_json(self):
        if self.name == "polynomial":
            return {"polynomial": [[c.real, c.imag] for c in self.coeffs]}
        return self.name

    @classmethod
    def from_json(cls, doc) -> "Activation":
        if isinstance(doc, str):
            return cls(doc)
        if isinstance(doc, dict) and "polynomial" in doc:
            return cls("polynomial", tuple(complex(re, im) for re, im in doc["polynomial"]))
        raise ConfigurationError(f"unknown activation {doc!r}")


@dataclass(frozen=True, eq=False)
class FfnnLayer:
    n_in: int
    n_out: int
    weights: np.ndarray
    bias: np.ndarray
    activations: tuple[Activation, ...]
    mask: np.ndarray | None = None
    positions: tuple[int | None, ...] | None = None

    def __post_init__(self) -> None:
        w, m = _masked(self.weights, self.mask, (self.n_in, self.n_out), "layer weights")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "mask", m)
        object.__setattr__(self, "bias", _vector(self.bias, self.n_out, "layer bias"))
        acts = tuple(a if isinstance(a, Activation) else Activation.from_json(a) for a in self.activations)
        if len(acts) == 1 and self.n_out > 1:
            acts = acts * self.n_out
        if len(acts) != self.n_out:
            raise ConfigurationError(f"layer needs {self.n_out} activations, got {len(acts)}")
        object.__setattr__(self, "activations", acts)

    def forward(self, x: np.ndarray) -> np.ndarray:
        z = x @ self.weights - self.bias
        out = np.empty_like(z)
        groups: dict[Activation, list[int]] = {}
        for j, act in enumerate(self.activations):
            groups.setdefault(act, []).append(j)
        for act, cols in groups.items():
            out[:, cols] = act(z[:, cols])
        return out


@dataclass(frozen=True, eq=False)
class FeedForwardSpec:
    layers: tuple[FfnnLayer, ...]
    visible_alphabet: Alphabet = Alphabet.PLUS_MINUS
    geometry: LatticeGeometry | None = None

    kind = "ffnn"

    def __post_init__(self) -> None:
        layers = tuple(self.layers)
        if not layers:
            raise ConfigurationError("feed-forward network needs at least one layer")
        for prev, nxt in zip(layers, layers[1:]):
            if prev.n_out != nxt.n_in:
                raise ConfigurationError("consecutive layer sizes disagree")
        object.__setattr__(self, "layers", layers)
        object.__setattr__(self, "visible_alphabet", Alphabet(self.visible_alphabet))

    @property
    def n_visible(self) -> int:
        return self.layers[0].n_in

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return (self.n_visible,) + tuple(layer.n_out for layer in self.layers)

    def layer_names(self) -> tuple[str, ...]:
        return tuple(f"layer{k}" for k in range(len(self.layers) + 1))

    def layer_positions(self, name: str, g: LatticeGeometry) -> tuple[int, ...]:
        k = int(name.removeprefix("layer"))
        if k == 0:
            return resolve_positions(None, self.n_visible, g, name)
        return resolve_positions(self.layers[k - 1].positions, self.layers[k - 1].n_out, g, name)

    def connections(self) -> list[tuple[str, int, str, int]]:
        out = []
        for k, layer in enumerate(self.layers):
            out += _edges(layer.mask, f"layer{k}", f"layer{k + 1}")
        return out

    def outputs(self, values: np.ndarray) -> np.ndarray:
        x = values.astype(np.complex128)
        for layer in self.layers:
            x = layer.forward(x)
        return x

    def batch_amplitudes(self, values: np.ndarray) -> np.ndarray:
        return self.outputs(values).prod(axis=1)

    def to_state(self) -> DenseState:
        check_size(self.n_visible)
        vals = self.visible_alphabet.values(index_bits(np.arange(2**self.n_visible), self.n_visible))
        return normalize(DenseState(self.n_visible, self.batch_amplitudes(vals.astype(np.float64))))


def ffnn_amplitude(spec: FeedForwardSpec, v) -> complex:
    values = _values(v, spec.n_visible, spec.visible_alphabet)
    return complex(spec.batch_amplitudes(values)[0])


# -- DBM ------------------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DbmSpec:
    n_visible: int
    n_shallow: int
    n_deep: int
    a: np.ndarray = None
    b: np.ndarray = None
    c: np.ndarray = None
    W_vh: np.ndarray = None
    W_hg: np.ndarray = None
    mask_vh: np.ndarray | None = None
    mask_hg: np.ndarray | None = None
    hidden_alphabet: Alphabet = Alphabet.ZERO_ONE
    visible_alphabet: Alphabet = Alphabet.PLUS_MINUS
    shallow_positions: tuple[int | None, ...] | None = None
    deep_positions: tuple[int | None, ...] | None = None
    geometry: LatticeGeometry | None = None
    max_deep: int = DEFAULT_MAX_DEEP

    kind = "dbm"

    def __post_init__(self) -> None:
        n, m, l = self.n_visible, self.n_shallow, self.n_deep
        object.__setattr__(self, "a", _vector(self.a, n, "visible bias"))
        object.__setattr__(self, "b", _vector(self.b, m, "shallow bias"))
        object.__setattr__(self, "c", _vector(self.c, l, "deep bias"))
        w, mk = _masked(np.zeros((n, m)) if self.W_vh is None else self.W_vh, self.mask_vh, (n, m), "W_vh")
        object.__setattr__(self, "W_vh", w)
        object.__setattr__(self, "mask_vh", mk)
        w, mk = _masked(np.zeros((l, m)) if self.W_hg is None else self.W_hg, self.mask_hg, (l, m), "W_hg")
        object.__setattr__(self, "W_hg", w)
        object.__setattr__(self, "mask_hg", mk)
        object.__setattr__(self, "hidden_alphabet", Alphabet(self.hidden_alphabet))
        object.__setattr__(self, "visible_alphabet", Alphabet(self.visible_alphabet))

    def layer_names(self) -> tuple[str, ...]:
        return ("visible", "shallow", "deep")

    def layer_positions(self, name: str, g: LatticeGeometry) -> tuple[int, ...]:
        if name == "visible":
            return resolve_positions(None, self.n_visible, g, name)
        if name == "shallow":
            return resolve_positions(self.shallow_positions, self.n_shallow, g, name)
        return resolve_positions(self.deep_positions, self.n_deep, g, name)

    def connections(self) -> list[tuple[str, int, str, int]]:
        return _edges(self.mask_vh, "visible", "shallow") + _edges(self.mask_hg, "deep", "shallow")

    def _check_deep(self) -> None:
        if self.n_deep > self.max_deep:
            raise ResourceError(
                f"deep layer of {self.n_deep} units needs 2**{self.n_deep} terms per amplitude; "
                f"limit is {self.max_deep}")

    def deep_values(self) -> np.ndarray:
        self._check_deep()
        bits = index_bits(np.arange(2**self.n_deep), self.n_deep)
        return self.hidden_alphabet.values(bits).astype(np.float64)

    def batch_log_amplitudes(self, values: np.ndarray) -> np.ndarray:
        """Shallow layer summed analytically, deep layer enumerated exactly."""
        g = self.deep_values()
        deep_field = g @ self.W_hg  # (2**l, m)
        deep_bias = g @ self.c  # (2**l,)
        vis_field = self.b + values @ self.W_vh  # (rows, m)
        rows = max(1, (1 << 22) // max(1, deep_field.size))
        out = np.empty(values.shape[0], dtype=np.complex128)
        for start in range(0, values.shape[0], rows):
            theta = vis_field[start:start + rows, None, :] + deep_field[None, :, :]
            terms = log_gamma(theta, self.hidden_alphabet).sum(axis=2) + deep_bias[None, :]
            out[start:start + rows] = logsumexp_complex(terms, axis=1)
        return out + values @ self.a

    def to_state(self) -> DenseState:
        return _network_state(self, self.n_visible, self.visible_alphabet)


def dbm_amplitude(spec: DbmSpec, v) -> complex:
    values = _values(v, spec.n_visible, spec.visible_alphabet)
    return complex(_log_to_amplitude(spec.batch_log_amplitudes(values))[0])


def _network_state(spec, n: int, alphabet: Alphabet) -> DenseState:
    check_size(n)
    out = np.empty(2**n, dtype=np.complex128)
    chunk = 1 << 12
    for start in range(0, 2**n, chunk):
        stop = min(start + chunk, 2**n)
        vals = alphabet.values(index_bits(np.arange(start, stop), n)).astype(np.float64)
        out[start:stop] = spec.batch_log_amplitudes(vals)
    return normalize(state_from_log_amplitudes(out, n))


# -- six-group decomposition for DBMs ---------------------------------------------------------


@dataclass(frozen=True)
class SixGroups:
    """Visible groups A_1..A_3 / A^c_1..A^c_3 and deep groups B_1..B_3 / B^c_1..B^c_3.

    Group 3 holds neurons sharing a shallow unit with the other side, group 2
    those sharing a shallow unit with group 3 of their own side, group 1 the
    rest. ``log2_bound`` counts groups 2 and 3 of both layers;
    ``support_log2`` counts only neurons touched by boundary shallow units,
    a tighter ceiling implied by the same factorization.
    """

    visible: dict[str, frozenset[int]]
    deep: dict[str, frozenset[int]]
    boundary_units: frozenset[int]
    support_visible: frozenset[int]
    support_deep: frozenset[int]

    @property
    def a_bd(self) -> frozenset[int]:
        v = self.visible
        return v["A2"] | v["A3"] | v["Ac3"] | v["Ac2"]

    @property
    def b_bd(self) -> frozenset[int]:
        d = self.deep
        return d["B2"] | d["B3"] | d["Bc3"] | d["Bc2"]

    @property
    def log2_bound(self) -> int:
        return len(self.a_bd) + len(self.b_bd)

    @property
    def support_log2(self) -> int:
        return len(self.support_visible) + len(self.support_deep)


def dbm_six_groups(spec: DbmSpec, part: Bipartition, g: LatticeGeometry | None = None) -> SixGroups:
    """Group visible and deep neurons around the cut; the deep cut mirrors the visible one."""
    if part.n_sites != spec.n_visible:
        raise InputError("bipartition does not match the visible layer")
    g = g or spec.geometry or LatticeGeometry.chain(spec.n_visible)
    a = set(part.region_a)
    deep_pos = spec.layer_positions("deep", g)
    b = {k for k in range(spec.n_deep) if deep_pos[k] in a}

    # nodes: ("v", i) or ("g", k); side True = A side
    units = []
    for j in range(spec.n_shallow):
        nodes = [("v", int(i)) for i in np.flatnonzero(spec.mask_vh[:, j])]
        nodes += [("g", int(k)) for k in np.flatnonzero(spec.mask_hg[:, j])]
        units.append(nodes)

    def side(node) -> bool:
        kind, idx = node
        return idx in a if kind == "v" else idx in b

    nbrs: dict[tuple[str, int], set] = {}
    for nodes in units:
        for x in nodes:
            nbrs.setdefault(x, set()).update(nodes)
    all_nodes = [("v", i) for i in range(spec.n_visible)] + [("g", k) for k in range(spec.n_deep)]
    group3 = {x for x in all_nodes if any(side(y) != side(x) for y in nbrs.get(x, ()))}
    group2 = {x for x in all_nodes if x not in group3
              and any(y in group3 and side(y) == side(x) for y in nbrs.get(x, ()))}

    def collect(kind: str, in_a: bool, grp: int) -> frozenset[int]:
        out = set()
        for x in all_nodes:
            if x[0] != kind or side(x) != in_a:
                continue
            level = 3 if x in group3 else 2 if x in group2 else 1
            if level == grp:
                out.add(x[1])
        return frozenset(out)

    visible = {("A" if s else "Ac") + str(k): collect("v", s, k) for s in (True, False) for k in (1, 2, 3)}
    deep = {("B" if s else "Bc") + str(k): collect("g", s, k) for s in (True, False) for k in (1, 2, 3)}
    boundary = frozenset(j for j, nodes in enumerate(units) if len({side(x) for x in nodes}) > 1)
    sup_v = frozenset(i for j in boundary for kind, i in units[j] if kind == "v")
    sup_g = frozenset(k for j in boundary for kind, k in units[j] if kind == "g")
    return SixGroups(visible, deep, boundary, sup_v, sup_g)


# -- random generators ----------------------------------------------------------------------------


@dataclass(frozen=True)
class Locality:
    """``eps=None`` requests dense connectivity; ``k`` caps connections per hidden unit."""

    eps: float | None = None
    k: int | None = None

    @classmethod
    def dense(cls) -> "Locality":
        return cls(None, None)

    @classmethod
    def k_local(cls, eps: float, k: int | None = None) -> "Locality":
        return cls(float(eps), k)


def _offset_key(g: LatticeGeometry, center: int, site: int) -> tuple:
    diff = g.coords[site] - g.coords[center]
    if g.boundary == "periodic":
        period = 2 * np.asarray(g.dims)
        diff = (diff + period // 2) % period - period // 2
    return (g.distance(center, site),) + tuple(int(x) for x in diff)


def local_mask(g: LatticeGeometry, n_from: int, to_positions: Sequence[int], loc: Locality,
               from_positions: Sequence[int] | None = None) -> np.ndarray:
    """Boolean ``(n_from, len(to_positions))`` connectivity for the requested locality."""
    mask = np.zeros((n_from, len(to_positions)), dtype=bool)
    if loc.eps is None:
        mask[:] = True
        return mask
    from_positions = list(range(n_from)) if from_positions is None else list(from_positions)
    for j, center in enumerate(to_positions):
        cands = [i for i in range(n_from) if g.distance(center, from_positions[i]) <= loc.eps]
        cands.sort(key=lambda i: _offset_key(g, center, from_positions[i]))
        if loc.k is not None:
            cands = cands[: loc.k]
        mask[cands, j] = True
    return mask


def _uniform(rng: np.random.Generator, shape, scale: float) -> np.ndarray:
    re = rng.uniform(-scale, scale, size=shape)
    im = rng.uniform(-scale, scale, size=shape)
    return re + 1j * im


def random_network(kind: str, n: int, locality: Locality, seed: int, scale: float = 1.0, *,
                   m: int | None = None, n_deep: int | None = None,
                   geometry: LatticeGeometry | None = None,
                   hidden_alphabet: Alphabet | None = None,
                   visible_alphabet: Alphabet = Alphabet.PLUS_MINUS):
    """Seeded random RBM or DBM; real and imaginary parts uniform in [-scale, scale].

    Hidden neurons sit on the duplicated site of their index, so hidden
    layers larger than the lattice need ``dense`` locality.
    """
    g = geometry or LatticeGeometry.chain(n)
    if g.n_sites != n:
        raise InputError(f"geometry has {g.n_sites} sites, network has {n} visible units")
    rng = np.random.default_rng(seed)
    m = n if m is None else m
    if kind == "rbm":
        hpos = tuple(range(m)) if locality.eps is not None else None
        mask = local_mask(g, n, hpos if hpos else [0] * m, locality)
        a = _uniform(rng, n, scale)
        b = _uniform(rng, m, scale)
        W = _uniform(rng, (n, m), scale)
        return RbmSpec(n, m, a, b, W, mask,
                       hidden_alphabet=hidden_alphabet or Alphabet.PLUS_MINUS,
                       visible_alphabet=visible_alphabet, hidden_positions=hpos, geometry=g)
    if kind == "dbm":
        l = n if n_deep is None else n_deep
        spos = tuple(range(m)) if locality.eps is not None else None
        dpos = tuple(range(l)) if locality.eps is not None else None
        mask_vh = local_mask(g, n, spos if spos else [0] * m, locality)
        mask_hg = local_mask(g, l, spos if spos else [0] * m, locality, from_positions=dpos)
        a = _uniform(rng, n, scale)
        b = _uniform(rng, m, scale)
        c = _uniform(rng, l, scale)
        W_vh = _uniform(rng, (n, m), scale)
        W_hg = _uniform(rng, (l, m), scale)
        return DbmSpec(n, m, l, a, b, c, W_vh, W_hg, mask_vh, mask_hg,
                       hidden_alphabet=hidden_alphabet or Alphabet.ZERO_ONE,
                       visible_alphabet=visible_alphabet, shallow_positions=spos,
                       deep_positions=dpos, geometry=g)
    raise InputError(f"unknown network kind {kind!r}")
