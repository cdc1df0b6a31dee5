"""Torus images as Z2 one-chains, cycle detection, target sets and target states.

Pixels live on the edges of the periodic L x L square lattice using the
edge numbering of :mod:`qnnent.geometry` (``d * L * L + y * L + x``).
Images use the 0/1 alphabet natively: pixel value 1 is basis state |1>.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateStateError, InputError
from .entanglement import boundary_area
from .geometry import HORIZONTAL, VERTICAL, LatticeGeometry
from .quasi_product import toric_stars
from .state import Bipartition, DenseState, check_size, index_bits, normalize


def n_edges(L: int) -> int:
    return 2 * L * L


@dataclass(frozen=True)
class TorusImage:
    L: int
    bits: int

    def __post_init__(self) -> None:
        if self.L < 1:
            raise InputError(f"L must be positive, got {self.L}")
        if not 0 <= self.bits < 2 ** n_edges(self.L):
            raise InputError(f"image bits out of range for {n_edges(self.L)} edges")

    @classmethod
    def from_edges(cls, L: int, edges: Iterable[int]) -> "TorusImage":
        bits = 0
        for e in edges:
            if not 0 <= e < n_edges(L):
                raise InputError(f"edge {e} outside 0..{n_edges(L) - 1}")
            bits ^= 1 << e
        return cls(L, bits)

    @property
    def n_pixels(self) -> int:
        return n_edges(self.L)

    def edge(self, x: int, y: int, d: int) -> int:
        return (self.bits >> edge_id(self.L, x, y, d)) & 1

    def __xor__(self, other: "TorusImage") -> "TorusImage":
        if other.L != self.L:
            raise InputError("images on different lattices")
        return TorusImage(self.L, self.bits ^ other.bits)


@dataclass(frozen=True)
class ZeroChain:
    L: int
    bits: int

    @property
    def trivial(self) -> bool:
        return self.bits == 0

    def vertex(self, x: int, y: int) -> int:
        return (self.bits >> ((y % self.L) * self.L + (x % self.L))) & 1

    def __xor__(self, other: "ZeroChain") -> "ZeroChain":
        return ZeroChain(self.L, self.bits ^ other.bits)


def edge_id(L: int, x: int, y: int, d: int) -> int:
    return d * L * L + (y % L) * L + (x % L)


def edge_endpoints(L: int, e: int) -> tuple[int, int]:
    """Vertex ids ``y * L + x`` of the two ends of edge ``e``."""
    d, r = divmod(e, L * L)
    y, x = divmod(r, L)
    if d == HORIZONTAL:
        return r, y * L + (x + 1) % L
    return r, ((y + 1) % L) * L + x


def boundary_map(img: TorusImage) -> ZeroChain:
    """Each vertex gets the mod-2 sum of its four incident edge pixels."""
    out = 0
    for v, star in enumerate(toric_stars(img.L)):
        parity = sum((img.bits >> e) & 1 for e in star) & 1
        out |= parity << v
    return ZeroChain(img.L, out)


def boundary_parities(bits: np.ndarray, L: int) -> np.ndarray:
    """Vectorized boundary: ``(rows, n_edges)`` bits to ``(rows, L*L)`` vertex parities."""
    return np.stack([bits[:, list(star)].sum(axis=1) % 2 for star in toric_stars(L)], axis=1)


def is_cycle(img: TorusImage) -> bool:
    return boundary_map(img).trivial


@dataclass(frozen=True)
class TargetSet:
    n_pixels: int
    members: tuple[int, ...]
    provenance: str = "custom"
    L: int | None = None

    def __post_init__(self) -> None:
        members = tuple(sorted(int(m) for m in self.members))
        if len(set(members)) != len(members):
            raise InputError("target set members must be distinct")
        if members and (members[0] < 0 or members[-1] >= 2**self.n_pixels):
            raise InputError(f"target image outside the {self.n_pixels}-pixel image space")
        object.__setattr__(self, "members", members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, bits: int) -> bool:
        return bits in self._lookup

    @property
    def _lookup(self) -> frozenset[int]:
        cached = self.__dict__.get("_lookup_cache")
        if cached is None:
            cached = frozenset(self.members)
            object.__setattr__(self, "_lookup_cache", cached)
        return cached


def enumerate_cycles(L: int) -> TargetSet:
    """All one-chains with trivial boundary, by brute force over every image."""
    n = n_edges(L)
    check_size(n, "cycle enumeration")
    idx = np.arange(2**n, dtype=np.int64)
    bits = index_bits(idx, n)
    closed = ~boundary_parities(bits, L).any(axis=1)
    return TargetSet(n, tuple(int(i) for i in idx[closed]), f"cycles({L})", L)


def classify(img: TorusImage | int, t: TargetSet, n_pixels: int | None = None) -> int:
    """Target function: 1 for members of ``t``, else 0."""
    if isinstance(img, TorusImage):
        bits, size = img.bits, img.n_pixels
    else:
        bits, size = int(img), t.n_pixels if n_pixels is None else n_pixels
    if size != t.n_pixels:
        raise InputError(f"image has {size} pixels, target set expects {t.n_pixels}")
    return int(bits in t)


def target_state(t: TargetSet) -> DenseState:
    """Normalized equal-amplitude superposition over the members of ``t``."""
    if not t.members:
        raise DegenerateStateError("empty target set has no state")
    check_size(t.n_pixels, "target state")
    amps = np.zeros(2**t.n_pixels, dtype=np.complex128)
    amps[list(t.members)] = 1.0
    return normalize(DenseState(t.n_pixels, amps))


def smooth_rank_bound(area, B: int = 1) -> int:
    """log2 of the rank ceiling ``2**((B + 1) * Area)`` for a locally smooth target set."""
    if B < 0:
        raise InputError(f"boundary range B must be non-negative, got {B}")
    area = getattr(area, "area", area)
    return (B + 1) * int(area)


@dataclass(frozen=True)
class SmoothContext:
    """Bound context giving ``(B + 1) * Area(A)`` for entropy sweeps over image states."""

    geometry: LatticeGeometry
    B: int = 1

    def boundary_log2(self, part: Bipartition) -> int:
        return smooth_rank_bound(boundary_area(self.geometry, part.region_a), self.B)


def random_target_set(n_pixels: int, count: int, seed: int) -> TargetSet:
    """Seeded uniform sample of ``count`` distinct images."""
    if count < 0 or count > 2**n_pixels:
        raise InputError(f"cannot draw {count} distinct images from 2**{n_pixels}")
    rng = np.random.default_rng(seed)
    members = rng.choice(2**n_pixels, size=count, replace=False)
    return TargetSet(n_pixels, tuple(int(m) for m in members), f"random(seed={seed},count={count})")


def pixel_grid(n_pixels: int) -> LatticeGeometry:
    """Most nearly square open grid holding ``n_pixels`` pixels (rows of the longer side)."""
    rows = max(d for d in range(1, int(math.isqrt(n_pixels)) + 1) if n_pixels % d == 0)
    cols = n_pixels // rows
    if rows == 1:
        return LatticeGeometry.chain(n_pixels, "open")
    return LatticeGeometry.square(cols, rows, boundary="open")


# -- bridge to the toric code ----------------------------------------------------------------


def dual_edge_map(L: int) -> np.ndarray:
    """``phi[e]``: image edge carrying toric edge ``e`` under lattice duality.

    Toric horizontal edge (a, b) maps to image vertical edge (a + 1, b) and
    toric vertical edge (a, b) to image horizontal edge (a, b + 1), which
    sends each toric plaquette onto the star of image vertex (x + 1, y + 1).
    Closed image loops therefore become plaquette-even toric configurations.
    """
    phi = np.empty(n_edges(L), dtype=np.int64)
    for y in range(L):
        for x in range(L):
            phi[edge_id(L, x, y, HORIZONTAL)] = edge_id(L, x + 1, y, VERTICAL)
            phi[edge_id(L, x, y, VERTICAL)] = edge_id(L, x, y + 1, HORIZONTAL)
    return phi


def image_state_to_toric(state: DenseState, L: int) -> DenseState:
    """Relabel an image-basis state onto toric-code edges.

    Pixel value 1 is the toric bit 1 (spin s = -1); only the edge labels change.
    """
    n = n_edges(L)
    if state.n_sites != n:
        raise InputError(f"state has {state.n_sites} sites, torus has {n} edges")
    phi = dual_edge_map(L)
    toric_idx = np.arange(2**n, dtype=np.int64)
    image_idx = np.zeros_like(toric_idx)
    for e in range(n):
        image_idx |= ((toric_idx >> e) & 1) << phi[e]
    return DenseState(n, state.amplitudes[image_idx], normalized=state.normalized)


# -- serialization -------------------------------------------------------------------------------


def dumps_target_set(t: TargetSet) -> str:
    header = {"L": t.L, "n_pixels": t.n_pixels, "provenance": t.provenance}
    width = max(1, (t.n_pixels + 3) // 4)
    lines = [json.dumps(header)] + [format(m, f"0{width}x") for m in t.members]
    return "\n".join(lines) + "\n"


def loads_target_set(text: str) -> TargetSet:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InputError("empty image-set document")
    try:
        header = json.loads(lines[0])
        members = tuple(int(ln, 16) for ln in lines[1:])
        return TargetSet(int(header["n_pixels"]), members, header.get("provenance", "custom"), header.get("L"))
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"malformed image-set document: {exc}") from exc


def images_from_bits(bits: Sequence[int], L: int) -> list[TorusImage]:
    return [TorusImage(L, int(b)) for b in bits]


def edge_midpoint(L: int, e: int) -> tuple[float, float]:
    """Plain lattice coordinates of an edge midpoint (handy for plots and tests)."""
    g = LatticeGeometry.torus_edges(L)
    cx, cy = g.coords[e]
    return cx / 2, cy / 2
