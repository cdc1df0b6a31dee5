"""Region families, entropy sweeps, area-law bound checks and topological entropy."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass
from typing import Protocol, Sequence

import numpy as np

from .errors import ConfigurationError, InputError, PreconditionError
from .geometry import EDGE, PERIODIC, LatticeGeometry
from .io import fmt
from .networks import DbmSpec, dbm_six_groups
from .quasi_product import ClusterCover, rank_bound
from .state import Bipartition, DenseState, nats_to_bits, numerical_rank, renyi_entropy, schmidt

BOUND_SLACK = 1e-9
CSV_FIELDS = ("region", "area", "volume", "alpha", "entropy_nats", "entropy_bits", "rank",
              "rank_bound_log2", "bound_ok", "bound_vacuous")


# -- regions ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Region:
    part: Bipartition
    label: str
    area: int

    @property
    def volume(self) -> int:
        return self.part.volume

    @property
    def sites(self) -> tuple[int, ...]:
        return self.part.region_a


@dataclass(frozen=True)
class RegionFamily:
    """``contiguous-1d``: ``lengths`` from ``start``; ``rectangle-2d``: ``width`` x ``height``
    boxes at ``corners`` (all corners when omitted); ``custom``: explicit ``sites`` lists."""

    kind: str
    start: int = 0
    lengths: tuple[int, ...] | None = None
    width: int = 1
    height: int = 1
    corners: tuple[tuple[int, int], ...] | None = None
    sites: tuple[tuple[int, ...], ...] = ()


def boundary_area(g: LatticeGeometry, region: Sequence[int]) -> int:
    """Number of sites of the region with a neighbour (distance <= 1) outside it."""
    a = np.zeros(g.n_sites, dtype=bool)
    a[list(region)] = True
    near = g.distance_matrix <= 1.0
    return int(np.count_nonzero(a & (near & ~a[None, :]).any(axis=1)))


def make_region(g: LatticeGeometry, sites: Sequence[int], label: str = "") -> Region:
    sites = sorted(set(int(s) for s in sites))
    if not sites or len(sites) >= g.n_sites:
        raise InputError(f"region {label or sites} is empty or covers the whole lattice")
    part = Bipartition(g.n_sites, tuple(sites), label)
    return Region(part, label or ",".join(map(str, sites)), boundary_area(g, sites))


def _rectangle_sites(g: LatticeGeometry, x0: int, y0: int, w: int, h: int) -> list[int]:
    lx, ly = g.dims
    if g.kind == EDGE:
        # edges whose midpoints lie in the closed box spanned by w x h plaquettes
        out = []
        for site, (cx, cy) in enumerate(g.coords):
            dx = (cx - 2 * x0) % (2 * lx)
            dy = (cy - 2 * y0) % (2 * ly)
            if dx <= 2 * w and dy <= 2 * h:
                out.append(site)
        return out
    out = []
    for dy in range(h):
        for dx in range(w):
            x, y = x0 + dx, y0 + dy
            if g.boundary != PERIODIC and (x >= lx or y >= ly):
                raise InputError(f"rectangle {w}x{h} at ({x0}, {y0}) leaves the open lattice")
            out.append(g.site_id(x, y))
    return out


def make_regions(g: LatticeGeometry, family: RegionFamily) -> list[Region]:
    """Deterministic region list, sorted by (volume, sites)."""
    regions: list[Region] = []
    if family.kind == "contiguous-1d":
        if g.dimensionality != 1:
            raise InputError("contiguous-1d regions need a one-dimensional lattice")
        n = g.n_sites
        lengths = family.lengths if family.lengths is not None else tuple(range(1, n))
        for length in lengths:
            if not 0 < length < n:
                raise InputError(f"region length {length} must lie strictly between 0 and {n}")
            if g.boundary != PERIODIC and family.start + length > n:
                raise InputError(f"region [{family.start}, {family.start + length}) leaves the open chain")
            sites = [(family.start + k) % n for k in range(length)]
            regions.append(make_region(g, sites, f"[{family.start}:{family.start + length})"))
    elif family.kind == "rectangle-2d":
        if g.dimensionality != 2:
            raise InputError("rectangle-2d regions need a two-dimensional lattice")
        lx, ly = g.dims
        corners = family.corners
        if corners is None:
            if g.boundary == PERIODIC:
                corners = tuple((x, y) for y in range(ly) for x in range(lx))
            else:
                corners = tuple((x, y) for y in range(ly - family.height + 1) for x in range(lx - family.width + 1))
        seen = set()
        for x0, y0 in corners:
            sites = tuple(sorted(set(_rectangle_sites(g, x0, y0, family.width, family.height))))
            if sites in seen:
                continue
            seen.add(sites)
            regions.append(make_region(g, sites, f"rect{family.width}x{family.height}@({x0},{y0})"))
    elif family.kind == "custom":
        for k, sites in enumerate(family.sites):
            regions.append(make_region(g, sites, f"custom{k}"))
    else:
        raise InputError(f"unknown region family {family.kind!r}")
    regions.sort(key=lambda r: (r.volume, r.sites))
    return regions


def rectangle_regions(g: LatticeGeometry, max_width: int | None = None,
                      max_height: int | None = None) -> list[Region]:
    """Every proper rectangular region of a 2D lattice, deduplicated and sorted."""
    lx, ly = g.dims
    seen: dict[tuple[int, ...], Region] = {}
    for w in range(1, (max_width or lx) + 1):
        for h in range(1, (max_height or ly) + 1):
            for y0 in range(ly):
                for x0 in range(lx):
                    if g.boundary != PERIODIC and (x0 + w > lx or y0 + h > ly):
                        continue
                    sites = tuple(sorted(set(_rectangle_sites(g, x0, y0, w, h))))
                    if 0 < len(sites) < g.n_sites and sites not in seen:
                        seen[sites] = make_region(g, sites, f"rect{w}x{h}@({x0},{y0})")
    return sorted(seen.values(), key=lambda r: (r.volume, r.sites))


def parse_region_spec(text: str, g: LatticeGeometry) -> RegionFamily:
    """``contiguous`` or ``rect:WxH``."""
    if text == "contiguous":
        return RegionFamily("contiguous-1d")
    if text.startswith("rect:"):
        try:
            w, h = (int(x) for x in text[5:].lower().split("x"))
        except ValueError as exc:
            raise InputError(f"bad rectangle spec {text!r}, expected rect:WxH") from exc
        return RegionFamily("rectangle-2d", width=w, height=h)
    raise InputError(f"unknown region spec {text!r}")


# -- bound contexts ------------------------------------------------------------------------


class BoundContext(Protocol):
    def boundary_log2(self, part: Bipartition) -> int: ...


@dataclass(frozen=True)
class CoverContext:
    cover: ClusterCover

    def boundary_log2(self, part: Bipartition) -> int:
        return rank_bound(self.cover, part).log2


@dataclass(frozen=True)
class DbmContext:
    spec: DbmSpec
    geometry: LatticeGeometry | None = None

    def boundary_log2(self, part: Bipartition) -> int:
        return dbm_six_groups(self.spec, part, self.geometry).log2_bound


def as_context(obj) -> BoundContext | None:
    if obj is None:
        return None
    if isinstance(obj, ClusterCover):
        return CoverContext(obj)
    if isinstance(obj, DbmSpec):
        return DbmContext(obj)
    if hasattr(obj, "boundary_log2"):
        return obj
    raise ConfigurationError(f"cannot derive a boundary bound from {type(obj).__name__}")


# -- sweeps ------------------------------------------------------------------------------------


@dataclass(frozen=True)
class EntropyRow:
    region: str
    area: int
    volume: int
    alpha: float
    entropy_nats: float
    rank: int
    rank_bound_log2: int | None = None
    bound_ok: bool | None = None
    bound_vacuous: bool | None = None

    @property
    def entropy_bits(self) -> float:
        return nats_to_bits(self.entropy_nats)

    def as_record(self) -> dict:
        d = asdict(self)
        d["entropy_bits"] = self.entropy_bits
        return {k: d[k] for k in CSV_FIELDS}


@dataclass(frozen=True)
class EntropyReport:
    rows: tuple[EntropyRow, ...]

    @property
    def all_bounds_ok(self) -> bool:
        return all(r.bound_ok is not False for r in self.rows)

    def failures(self) -> list[EntropyRow]:
        return [r for r in self.rows if r.bound_ok is False]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for r in self.rows:
            rec = r.as_record()
            w.writerow([_cell(rec[k]) for k in CSV_FIELDS])
        return buf.getvalue()

    def to_json(self) -> str:
        recs = [{k: _json_cell(v) for k, v in r.as_record().items()} for r in self.rows]
        return json.dumps(recs, indent=1)


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt(v)
    return str(v)


def _json_cell(v):
    return float(fmt(v)) if isinstance(v, float) else v


def bound_ok(entropy: float, rank: int, log2_bound: int) -> bool:
    return entropy <= log2_bound * math.log(2) + BOUND_SLACK and rank <= 2**log2_bound


def entropy_sweep(state: DenseState, regions: Sequence[Region], alphas: Sequence[float],
                  context=None) -> EntropyReport:
    if not state.normalized:
        raise PreconditionError("entropy_sweep needs a normalized state")
    ctx = as_context(context)
    rows = []
    for region in regions:
        spec = schmidt(state, region.part)
        rank = numerical_rank(spec)
        log2b = ctx.boundary_log2(region.part) if ctx is not None else None
        for alpha in alphas:
            s = renyi_entropy(spec, alpha)
            ok = vac = None
            if log2b is not None:
                ok = bound_ok(s, rank, log2b)
                vac = log2b >= state.n_sites / 2
            rows.append(EntropyRow(region.label, region.area, region.volume, float(alpha), s, rank, log2b, ok, vac))
    return EntropyReport(tuple(rows))


@dataclass(frozen=True)
class AreaLawRow:
    region: str
    area: int
    volume: int
    alpha: float
    entropy_nats: float
    rank: int
    boundary_size: int
    rank_ok: bool
    entropy_ok: bool
    empirical_R: float
    bound_vacuous: bool

    @property
    def passed(self) -> bool:
        return self.rank_ok and self.entropy_ok


@dataclass(frozen=True)
class AreaLawReport:
    rows: tuple[AreaLawRow, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def violations(self) -> list[AreaLawRow]:
        return [r for r in self.rows if not r.passed]

    @property
    def max_R(self) -> float:
        return max((r.empirical_R for r in self.rows), default=0.0)


def area_law_check(state: DenseState, context, regions: Sequence[Region],
                   alphas: Sequence[float]) -> AreaLawReport:
    """Per region: rank <= 2**|B|, S_alpha <= |B| ln 2, and the ratio |B| / Area."""
    if context is None:
        raise ConfigurationError("area_law_check needs a cover or DBM context")
    ctx = as_context(context)
    if not state.normalized:
        raise PreconditionError("area_law_check needs a normalized state")
    rows = []
    for region in regions:
        spec = schmidt(state, region.part)
        rank = numerical_rank(spec)
        b = ctx.boundary_log2(region.part)
        ratio = b / region.area if region.area else float("inf") if b else 0.0
        for alpha in alphas:
            s = renyi_entropy(spec, alpha)
            rows.append(AreaLawRow(region.label, region.area, region.volume, float(alpha), s, rank, b,
                                   rank <= 2**b, s <= b * math.log(2) + BOUND_SLACK, ratio,
                                   b >= state.n_sites / 2))
    return AreaLawReport(tuple(rows))


# -- topological entropy -----------------------------------------------------------------------


def region_entropy(state: DenseState, sites: Sequence[int], alpha: float = 1.0) -> float:
    sites = sorted(set(sites))
    if not sites or len(sites) == state.n_sites:
        return 0.0  # pure global state
    return renyi_entropy(schmidt(state, Bipartition(state.n_sites, tuple(sites))), alpha)


def topological_entropy(state: DenseState, a: Sequence[int], b: Sequence[int], c: Sequence[int],
                        alpha: float = 1.0) -> float:
    """S(AB) + S(CB) + S(AC) - S(A) - S(B) - S(C) - S(D) with D = A u B u C.

    The negated value is the Kitaev-Preskill combination
    S_A + S_B + S_C - S_AB - S_BC - S_CA + S_ABC.
    """
    sa, sb, sc = set(a), set(b), set(c)
    if not (sa and sb and sc):
        raise InputError("the three regions must be nonempty")
    if sa & sb or sb & sc or sa & sc:
        raise InputError("regions A, B, C must be pairwise disjoint")
    d = sa | sb | sc
    if len(d) >= state.n_sites:
        raise InputError("A u B u C must be a proper subset of the sites")
    s = lambda r: region_entropy(state, r, alpha)  # noqa: E731
    return s(sa | sb) + s(sc | sb) + s(sa | sc) - s(sa) - s(sb) - s(sc) - s(d)


def toric_fan_partition(L: int) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
    """Three fan-shaped regions tiling the disc of edges inside a 2x2 plaquette block.

    The block spans vertices (0, 0)..(2, 2); edges are split by the angle
    of their midpoint around the centre vertex (1, 1) into 120-degree fans.
    """
    if L < 3:
        raise InputError("the fan partition needs L >= 3")
    g = LatticeGeometry.torus_edges(L)
    fans: list[list[int]] = [[], [], []]
    for site, (cx, cy) in enumerate(g.coords):
        if cx > 4 or cy > 4:
            continue  # outside the closed 2x2 block
        ang = math.atan2(cy / 2 - 1, cx / 2 - 1) + 0.3
        fans[int((ang % (2 * math.pi)) // (2 * math.pi / 3)) % 3].append(site)
    return tuple(tuple(f) for f in fans)
