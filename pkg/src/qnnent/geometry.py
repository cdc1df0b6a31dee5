"""Lattice geometry shared by the physical layer and every duplicated network layer.

Coordinates are stored doubled so that edge midpoints on the edge lattice
stay integral: a vertex ``(x, y)`` lives at ``(2x, 2y)``, the horizontal
edge leaving it at ``(2x + 1, 2y)`` and the vertical one at ``(2x, 2y + 1)``.
Distances are Chebyshev (L-infinity) distances reported in lattice units,
i.e. half the doubled-coordinate distance, with wrap-around on periodic
lattices.

Edge-lattice site ids follow ``d * Lx * Ly + y * Lx + x`` with ``d = 0``
for horizontal and ``d = 1`` for vertical edges. Horizontal edge
``(x, y, 0)`` joins vertex ``(x, y)`` to ``(x + 1, y)``; vertical edge
``(x, y, 1)`` joins ``(x, y)`` to ``(x, y + 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Protocol, Sequence

import numpy as np

from .errors import ConfigurationError, InputError

VERTEX = "vertex"
EDGE = "edge"
OPEN = "open"
PERIODIC = "periodic"

HORIZONTAL = 0
VERTICAL = 1


@dataclass(frozen=True)
class LatticeGeometry:
    kind: str
    dims: tuple[int, ...]
    boundary: str = PERIODIC

    def __post_init__(self) -> None:
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if self.kind not in (VERTEX, EDGE):
            raise InputError(f"unknown lattice kind {self.kind!r}")
        if self.boundary not in (OPEN, PERIODIC):
            raise InputError(f"unknown boundary {self.boundary!r}")
        if len(self.dims) not in (1, 2) or any(d < 1 for d in self.dims):
            raise InputError(f"dims must be one or two positive integers, got {self.dims}")
        if self.kind == EDGE and (len(self.dims) != 2 or self.boundary != PERIODIC):
            raise InputError("edge lattices are two-dimensional and periodic")

    @classmethod
    def chain(cls, n: int, boundary: str = PERIODIC) -> "LatticeGeometry":
        return cls(VERTEX, (n,), boundary)

    @classmethod
    def square(cls, lx: int, ly: int | None = None, boundary: str = PERIODIC) -> "LatticeGeometry":
        return cls(VERTEX, (lx, lx if ly is None else ly), boundary)

    @classmethod
    def torus_edges(cls, lx: int, ly: int | None = None) -> "LatticeGeometry":
        return cls(EDGE, (lx, lx if ly is None else ly), PERIODIC)

    @property
    def dimensionality(self) -> int:
        return len(self.dims)

    @property
    def n_sites(self) -> int:
        n = int(np.prod(self.dims))
        return 2 * n if self.kind == EDGE else n

    @cached_property
    def coords(self) -> np.ndarray:
        """Doubled integer coordinates, shape ``(n_sites, dimensionality)``."""
        if self.kind == VERTEX:
            if self.dimensionality == 1:
                return 2 * np.arange(self.dims[0])[:, None]
            lx, ly = self.dims
            ids = np.arange(lx * ly)
            return 2 * np.stack([ids % lx, ids // lx], axis=1)
        lx, ly = self.dims
        ids = np.arange(2 * lx * ly)
        d, r = ids // (lx * ly), ids % (lx * ly)
        x, y = r % lx, r // lx
        return np.stack([2 * x + (d == HORIZONTAL), 2 * y + (d == VERTICAL)], axis=1)

    @property
    def _period(self) -> np.ndarray:
        return 2 * np.asarray(self.dims)

    def _check(self, site: int) -> int:
        if not isinstance(site, (int, np.integer)) or not 0 <= site < self.n_sites:
            raise InputError(f"unknown site id {site!r} (lattice has {self.n_sites} sites)")
        return int(site)

    def site_id(self, *coord: int, direction: int | None = None) -> int:
        """Site id from plain lattice coordinates (wrapped on periodic lattices)."""
        if len(coord) != self.dimensionality:
            raise InputError(f"expected {self.dimensionality} coordinates, got {coord}")
        c = list(coord)
        for k, (ck, dk) in enumerate(zip(c, self.dims)):
            if self.boundary == PERIODIC:
                c[k] = ck % dk
            elif not 0 <= ck < dk:
                raise InputError(f"coordinate {coord} outside open lattice {self.dims}")
        if self.kind == EDGE:
            if direction not in (HORIZONTAL, VERTICAL):
                raise InputError("edge lattices need direction 0 (horizontal) or 1 (vertical)")
            lx, ly = self.dims
            return direction * lx * ly + c[1] * lx + c[0]
        if self.dimensionality == 1:
            return c[0]
        return c[1] * self.dims[0] + c[0]

    def _doubled_distance(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        diff = np.abs(a - b)
        if self.boundary == PERIODIC:
            diff = np.minimum(diff, self._period - diff)
        return diff.max(axis=-1)

    def distance(self, a: int, b: int) -> float:
        a, b = self._check(a), self._check(b)
        return float(self._doubled_distance(self.coords[a], self.coords[b])) / 2.0

    def distances_from(self, center: int) -> np.ndarray:
        """Distances from ``center`` to every site, in lattice units."""
        center = self._check(center)
        return self._doubled_distance(self.coords, self.coords[center]) / 2.0

    @cached_property
    def distance_matrix(self) -> np.ndarray:
        c = self.coords
        return self._doubled_distance(c[:, None, :], c[None, :, :]) / 2.0

    def to_dict(self) -> dict:
        return {"kind": self.kind, "dims": list(self.dims), "boundary": self.boundary}

    @classmethod
    def from_dict(cls, d: dict) -> "LatticeGeometry":
        return cls(d["kind"], tuple(d["dims"]), d.get("boundary", PERIODIC))


@dataclass(frozen=True)
class Neighborhood:
    center: int
    radius: float
    members: frozenset[int] = field(default_factory=frozenset)


def distance(g: LatticeGeometry, a: int, b: int) -> float:
    return g.distance(a, b)


def epsilon_ball(g: LatticeGeometry, center: int, eps: float) -> Neighborhood:
    if eps < 0:
        raise InputError(f"eps must be non-negative, got {eps}")
    d = g.distances_from(center)
    members = frozenset(int(i) for i in np.flatnonzero(d <= eps))
    return Neighborhood(int(center), float(eps), members)


# -- K-locality ---------------------------------------------------------------


class LayeredNetwork(Protocol):
    """What :func:`validate_k_local` needs from a network spec."""

    def layer_names(self) -> Sequence[str]: ...

    def layer_positions(self, name: str, g: LatticeGeometry) -> Sequence[int]: ...

    def connections(self) -> Iterable[tuple[str, int, str, int]]: ...


@dataclass(frozen=True)
class LocalityReport:
    is_local: bool
    K: int
    violations: tuple[tuple[str, int, str, int], ...]


def resolve_positions(positions: Sequence[int | None] | None, size: int, g: LatticeGeometry,
                      layer: str) -> tuple[int, ...]:
    """Per-neuron site ids; unassigned neurons take the duplicated position of their index."""
    out = []
    for j in range(size):
        p = None if positions is None else positions[j]
        if p is None:
            if j >= g.n_sites:
                raise ConfigurationError(
                    f"neuron {j} of layer {layer!r} has no position and no duplicated site")
            p = j
        if not 0 <= int(p) < g.n_sites:
            raise ConfigurationError(f"neuron {j} of layer {layer!r} placed on unknown site {p}")
        out.append(int(p))
    return tuple(out)


def validate_k_local(spec: LayeredNetwork, g: LatticeGeometry, eps: float) -> LocalityReport:
    """Check that every nonzero connection stays inside an eps-ball and measure K.

    K is the largest number of connections any non-physical neuron has to
    one adjacent layer. The first layer in ``spec.layer_names()`` is the
    physical layer.
    """
    names = list(spec.layer_names())
    pos = {name: spec.layer_positions(name, g) for name in names}
    counts: dict[tuple[str, int, str], int] = {}
    violations = []
    for la, i, lb, j in spec.connections():
        pa, pb = pos[la][i], pos[lb][j]
        if g.distance(pa, pb) > eps:
            violations.append((la, i, lb, j))
        counts[(la, i, lb)] = counts.get((la, i, lb), 0) + 1
        counts[(lb, j, la)] = counts.get((lb, j, la), 0) + 1
    physical = names[0]
    K = max((c for (layer, _, _), c in counts.items() if layer != physical), default=0)
    return LocalityReport(not violations, K, tuple(violations))
