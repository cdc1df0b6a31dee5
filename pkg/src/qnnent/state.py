"""Dense wavefunctions, basis enumeration, Pauli strings, Schmidt spectra and Renyi entropies.

Bit convention (project wide): site ``i`` is bit ``i`` of the basis index,
site 0 least significant. Under the ``PLUS_MINUS`` alphabet bit ``b`` is
read as the spin value ``1 - 2b``, so bit 0 is ``s = +1``.
"""

from __future__ import annotations

import enum
import math
import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DegenerateStateError, InputError, PreconditionError, ResourceError

DEFAULT_MAX_SITES = 22
MAX_SITES_ENV = "QNNENT_MAX_SITES"
NORM_TOL = 1e-10


def max_sites() -> int:
    raw = os.environ.get(MAX_SITES_ENV)
    return int(raw) if raw else DEFAULT_MAX_SITES


def memory_estimate(n: int) -> str:
    nbytes = 16 * 2**n
    for unit in ("B", "KiB", "MiB", "GiB", "TiB", "PiB"):
        if nbytes < 1024 or unit == "PiB":
            return f"{nbytes:.1f} {unit}" if unit != "B" else f"{nbytes} B"
        nbytes /= 1024
    raise AssertionError  # pragma: no cover


def check_size(n: int, what: str = "dense state") -> None:
    limit = max_sites()
    if n > limit:
        raise ResourceError(
            f"{what} on {n} sites needs {memory_estimate(n)} of amplitudes; "
            f"limit is {limit} sites (set {MAX_SITES_ENV} to raise it)")


class Alphabet(str, enum.Enum):
    ZERO_ONE = "zero_one"
    PLUS_MINUS = "plus_minus"

    def values(self, bits):
        """Map bits to site values of this alphabet (works on ints and arrays)."""
        if self is Alphabet.PLUS_MINUS:
            return 1 - 2 * bits
        return bits

    def bit(self, value) -> int:
        if self is Alphabet.PLUS_MINUS:
            if value not in (1, -1):
                raise InputError(f"spin value must be +1 or -1, got {value!r}")
            return (1 - value) // 2
        if value not in (0, 1):
            raise InputError(f"bit value must be 0 or 1, got {value!r}")
        return value

    def domain(self) -> tuple[int, int]:
        return (1, -1) if self is Alphabet.PLUS_MINUS else (0, 1)


@dataclass(frozen=True)
class SpinConfiguration:
    n_sites: int
    bits: int
    alphabet: Alphabet = Alphabet.ZERO_ONE

    def __post_init__(self) -> None:
        if not 0 <= self.bits < 2**self.n_sites:
            raise InputError(f"bits {self.bits} out of range for {self.n_sites} sites")

    @classmethod
    def from_values(cls, values: Sequence[int], alphabet: Alphabet = Alphabet.ZERO_ONE) -> "SpinConfiguration":
        bits = sum(alphabet.bit(v) << i for i, v in enumerate(values))
        return cls(len(values), bits, alphabet)

    @property
    def index(self) -> int:
        return self.bits

    def bit(self, site: int) -> int:
        return (self.bits >> site) & 1

    def values(self) -> tuple[int, ...]:
        return tuple(int(self.alphabet.values(self.bit(i))) for i in range(self.n_sites))

    def value_array(self) -> np.ndarray:
        return self.alphabet.values(index_bits(np.array([self.bits]), self.n_sites))[0]

    def flipped(self, *sites: int) -> "SpinConfiguration":
        mask = sum(1 << s for s in sites)
        return SpinConfiguration(self.n_sites, self.bits ^ mask, self.alphabet)


def index_bits(indices: np.ndarray, n: int) -> np.ndarray:
    """Bit matrix of shape ``(len(indices), n)``; column ``i`` is site ``i``."""
    return ((np.asarray(indices, dtype=np.int64)[:, None] >> np.arange(n)) & 1).astype(np.int8)


def all_configurations(n: int, alphabet: Alphabet = Alphabet.ZERO_ONE) -> Iterable[SpinConfiguration]:
    for idx in range(2**n):
        yield SpinConfiguration(n, idx, alphabet)


@dataclass(frozen=True, eq=False)
class DenseState:
    n_sites: int
    amplitudes: np.ndarray
    normalized: bool = False

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.shape != (2**self.n_sites,):
            raise InputError(f"expected {2**self.n_sites} amplitudes, got shape {amps.shape}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        if self.normalized and abs(self.norm() - 1.0) > NORM_TOL:
            raise PreconditionError("state flagged normalized but norm differs from 1")

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: "DenseState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "DenseState") -> float:
        return abs(self.inner(other)) ** 2 / (self.norm() ** 2 * other.norm() ** 2)

    def __len__(self) -> int:
        return len(self.amplitudes)


def evaluate_all(amp: Callable, n: int, *, alphabet: Alphabet = Alphabet.ZERO_ONE,
                 batch: bool = False, threads: int | None = None,
                 chunk: int = 1 << 14) -> DenseState:
    """Materialize an amplitude function over all ``2**n`` basis configurations.

    With ``batch=False`` ``amp`` receives one :class:`SpinConfiguration` at a
    time. With ``batch=True`` it receives an integer array of site values in
    ``alphabet`` with shape ``(rows, n)`` and returns ``rows`` amplitudes.
    Chunks are written to disjoint slices so the result does not depend on
    the thread count.
    """
    check_size(n)
    size = 2**n
    out = np.empty(size, dtype=np.complex128)
    starts = list(range(0, size, chunk))

    def work(start: int) -> None:
        stop = min(start + chunk, size)
        if batch:
            values = alphabet.values(index_bits(np.arange(start, stop), n))
            out[start:stop] = np.asarray(amp(values), dtype=np.complex128)
        else:
            for idx in range(start, stop):
                out[idx] = amp(SpinConfiguration(n, idx, alphabet))

    workers = threads or 1
    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(work, starts))
    else:
        for s in starts:
            work(s)
    return DenseState(n, out, normalized=False)


def state_from_log_amplitudes(log_amp: np.ndarray, n: int) -> DenseState:
    """Exponentiate log-amplitudes after subtracting the largest real part.

    Entries equal to ``-inf`` (exact zeros) stay zero.
    """
    log_amp = np.asarray(log_amp, dtype=np.complex128)
    finite = np.isfinite(log_amp.real)
    if not finite.any():
        raise DegenerateStateError("all amplitudes vanish")
    shift = log_amp.real[finite].max()
    out = np.zeros_like(log_amp)
    out[finite] = np.exp(log_amp[finite] - shift)
    return DenseState(n, out)


def normalize(state: DenseState) -> DenseState:
    norm = state.norm()
    if norm == 0.0 or not np.isfinite(norm):
        raise DegenerateStateError("cannot normalize a zero or non-finite vector")
    return DenseState(state.n_sites, state.amplitudes / norm, normalized=True)


# -- Pauli strings -------------------------------------------------------------

PauliString = Sequence[tuple[int, str]]


def _check_pauli(ops: PauliString, n: int) -> list[tuple[int, str]]:
    seen = set()
    out = []
    for site, op in ops:
        op = op.upper()
        if op not in ("X", "Y", "Z"):
            raise InputError(f"unknown Pauli operator {op!r}")
        if not 0 <= site < n:
            raise InputError(f"site {site} outside 0..{n - 1}")
        if site in seen:
            raise InputError(f"duplicate site {site} in Pauli string")
        seen.add(site)
        out.append((int(site), op))
    return out


def apply_pauli_string(state: DenseState, ops: PauliString) -> DenseState:
    """Apply a tensor product of single-site Paulis.

    Z contributes ``(-1)**bit``, X flips the bit and Y = iXZ, evaluated on
    the input bit before the flip.
    """
    ops = _check_pauli(ops, state.n_sites)
    idx = np.arange(len(state.amplitudes), dtype=np.int64)
    flip = 0
    phase = np.ones(len(idx), dtype=np.complex128)
    for site, op in ops:
        bit = (idx >> site) & 1
        if op in ("X", "Y"):
            flip |= 1 << site
        if op in ("Z", "Y"):
            phase *= 1 - 2 * bit
        if op == "Y":
            phase *= 1j
    # out[j ^ flip] = phase[j] * psi[j]
    out = np.empty_like(state.amplitudes)
    out[idx ^ flip] = phase * state.amplitudes
    return DenseState(state.n_sites, out, normalized=state.normalized)


def expectation(state: DenseState, ops: PauliString) -> complex:
    if not state.normalized:
        raise PreconditionError("expectation values need a normalized state")
    return complex(np.vdot(state.amplitudes, apply_pauli_string(state, ops).amplitudes))


# -- bipartitions and spectra ------------------------------------------------------


@dataclass(frozen=True)
class Bipartition:
    n_sites: int
    region_a: tuple[int, ...]
    label: str = ""

    def __post_init__(self) -> None:
        a = tuple(sorted(set(int(s) for s in self.region_a)))
        if not a or len(a) >= self.n_sites:
            raise InputError("region must be a nonempty proper subset of the sites")
        if a[0] < 0 or a[-1] >= self.n_sites:
            raise InputError(f"region sites must lie in 0..{self.n_sites - 1}")
        object.__setattr__(self, "region_a", a)

    @property
    def complement(self) -> tuple[int, ...]:
        a = set(self.region_a)
        return tuple(i for i in range(self.n_sites) if i not in a)

    def swapped(self) -> "Bipartition":
        return Bipartition(self.n_sites, self.complement, self.label)

    @property
    def volume(self) -> int:
        return len(self.region_a)


def amplitude_matrix(state: DenseState, region: Sequence[int]) -> np.ndarray:
    """Reshape amplitudes to ``2**|A| x 2**|A^c|``.

    Row index is ``sum_k bit(A[k]) * 2**k`` (ascending site order, first
    site least significant); columns likewise over the complement.
    """
    n = state.n_sites
    a = sorted(region)
    ac = [i for i in range(n) if i not in set(a)]
    tensor = state.amplitudes.reshape((2,) * n)  # axis k <-> site n-1-k
    axes = [n - 1 - s for s in reversed(a)] + [n - 1 - s for s in reversed(ac)]
    return tensor.transpose(axes).reshape(2 ** len(a), 2 ** len(ac))


@dataclass(frozen=True, eq=False)
class SchmidtSpectrum:
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.sort(np.asarray(self.values, dtype=np.float64))[::-1].copy()
        if (v < 0).any():
            raise InputError("Schmidt values must be non-negative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def probabilities(self) -> np.ndarray:
        return self.values**2


def schmidt(state: DenseState, part: Bipartition) -> SchmidtSpectrum:
    if not state.normalized:
        raise PreconditionError("schmidt() needs a normalized state")
    if part.n_sites != state.n_sites:
        raise InputError("bipartition and state disagree on the number of sites")
    m = amplitude_matrix(state, part.region_a)
    return SchmidtSpectrum(np.linalg.svd(m, compute_uv=False))


def renyi_entropy(spec: SchmidtSpectrum, alpha: float) -> float:
    """Renyi entropy in nats; ``alpha == 1`` is the von Neumann branch."""
    if not alpha > 0:
        raise InputError(f"alpha must be positive, got {alpha}")
    p = spec.probabilities
    p = p[p > 0]
    if alpha == 1:
        return float(max(0.0, -np.sum(p * np.log(p))))
    if math.isinf(alpha):
        return float(max(0.0, -np.log(p.max())))
    return float(max(0.0, np.log(np.sum(p**alpha)) / (1.0 - alpha)))


def nats_to_bits(value: float) -> float:
    return value / math.log(2)


def numerical_rank(spec: SchmidtSpectrum, rel_tol: float = 1e-10) -> int:
    v = spec.values
    if v.size == 0 or v[0] == 0:
        return 0
    return int(np.count_nonzero(v > rel_tol * v[0]))


# -- .qns binary format ----------------------------------------------------------

QNS_MAGIC = b"QNNS"
QNS_VERSION = 1
_HEADER = struct.Struct("<4sIIB")


def dumps_qns(state: DenseState) -> bytes:
    body = np.empty(2 * len(state.amplitudes), dtype="<f8")
    body[0::2] = state.amplitudes.real
    body[1::2] = state.amplitudes.imag
    return _HEADER.pack(QNS_MAGIC, QNS_VERSION, state.n_sites, int(state.normalized)) + body.tobytes()


def loads_qns(data: bytes) -> DenseState:
    if len(data) < _HEADER.size:
        raise InputError("state file truncated before header end")
    magic, version, n, flag = _HEADER.unpack_from(data)
    if magic != QNS_MAGIC:
        raise InputError(f"bad magic {magic!r}, expected {QNS_MAGIC!r}")
    if version != QNS_VERSION:
        raise InputError(f"unsupported state file version {version}")
    if n > 62:
        raise InputError(f"implausible site count {n}")
    expected = _HEADER.size + 16 * 2**n
    if len(data) != expected:
        raise InputError(f"state file has {len(data)} bytes, expected {expected} for {n} sites")
    body = np.frombuffer(data, dtype="<f8", offset=_HEADER.size)
    amps = body[0::2] + 1j * body[1::2]
    return DenseState(n, amps, normalized=bool(flag))


def write_qns(state: DenseState, path: str | os.PathLike) -> None:
    from .io import atomic_write_bytes

    atomic_write_bytes(Path(path), dumps_qns(state))


def read_qns(path: str | os.PathLike) -> DenseState:
    return loads_qns(Path(path).read_bytes())
