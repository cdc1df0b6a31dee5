"""Independent reference implementations used to cross-check the package."""

from __future__ import annotations

import itertools

import numpy as np


def bits_of(index: int, n: int) -> list[int]:
    return [(index >> i) & 1 for i in range(n)]


def reduced_density_matrix(psi: np.ndarray, n: int, region: list[int]) -> np.ndarray:
    """Partial trace by explicit double loop over basis indices."""
    region = sorted(region)
    rest = [i for i in range(n) if i not in region]
    dim_a = 2 ** len(region)
    rho = np.zeros((dim_a, dim_a), dtype=complex)
    for x in range(2**n):
        bx = bits_of(x, n)
        ax = sum(bx[s] << k for k, s in enumerate(region))
        cx = [bx[s] for s in rest]
        for y in range(2**n):
            by = bits_of(y, n)
            if [by[s] for s in rest] != cx:
                continue
            ay = sum(by[s] << k for k, s in enumerate(region))
            rho[ax, ay] += psi[x] * np.conj(psi[y])
    return rho


def renyi_from_rho(rho: np.ndarray, alpha: float) -> float:
    p = np.clip(np.linalg.eigvalsh(rho), 0, None)
    p = p[p > 1e-15]
    if alpha == 1:
        return float(-(p * np.log(p)).sum())
    return float(np.log((p**alpha).sum()) / (1 - alpha))


def cz_graph_state(edges, n: int) -> np.ndarray:
    """|+>^n followed by a CZ gate per edge, applied as phase accumulation."""
    psi = np.full(2**n, 2 ** (-n / 2), dtype=complex)
    for i, j in edges:
        for x in range(2**n):
            if (x >> i) & 1 and (x >> j) & 1:
                psi[x] *= -1
    return psi


def dbm_brute_force(spec, values: np.ndarray) -> complex:
    """Sum exp(energy) over every shallow and deep hidden configuration explicitly."""
    hv = spec.hidden_alphabet.values(np.array([0, 1])).astype(float)
    h = np.array(list(itertools.product(hv, repeat=spec.n_shallow))).reshape(-1, spec.n_shallow)
    g = np.array(list(itertools.product(hv, repeat=spec.n_deep))).reshape(-1, spec.n_deep)
    energy = (values @ spec.a
              + (h @ spec.b)[:, None]
              + (g @ spec.c)[None, :]
              + (h @ (values @ spec.W_vh))[:, None]
              + h @ (g @ spec.W_hg).T)
    return complex(np.exp(energy).sum())


def rbm_brute_force(spec, values: np.ndarray) -> complex:
    hv = spec.hidden_alphabet.values(np.array([0, 1]))
    total = 0j
    for h in itertools.product(hv, repeat=spec.n_hidden):
        h = np.array(h, dtype=float)
        total += np.exp(values @ spec.a + h @ spec.b + values @ spec.W @ h)
    return complex(total)


def random_graph(n: int, p: float, rng: np.random.Generator) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]


def overlap_fidelity(a: np.ndarray, b: np.ndarray) -> float:
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    return float(abs(np.vdot(a, b)) ** 2)
