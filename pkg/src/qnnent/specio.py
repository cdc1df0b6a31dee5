"""Load and save network specifications as JSON, validated against the bundled schema."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from .errors import ConfigurationError, InputError
from .geometry import LatticeGeometry
from .networks import (
    DbmSpec,
    FeedForwardSpec,
    FfnnLayer,
    Locality,
    RbmSpec,
    local_mask,
    random_network,
)
from .quasi_product import ClusterCover
from .state import Alphabet


@lru_cache(maxsize=1)
def network_schema() -> dict:
    text = resources.files("qnnent").joinpath("schemas/network_spec.schema.json").read_text()
    return json.loads(text)


def _path(err: jsonschema.ValidationError) -> str:
    parts = "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in err.absolute_path)
    return "$" + parts


def validate_document(doc: Any) -> None:
    """Raise :class:`InputError` naming the offending field path."""
    validator = jsonschema.Draft202012Validator(network_schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    if errors:
        best = jsonschema.exceptions.best_match(errors)
        raise InputError(f"spec field {_path(best)}: {best.message}")


def _complex(x) -> complex:
    return complex(x[0], x[1]) if isinstance(x, list) else complex(x)


def _cvec(xs) -> np.ndarray | None:
    return None if xs is None else np.array([_complex(x) for x in xs], dtype=np.complex128)


def _cmat(rows) -> np.ndarray | None:
    if rows is None:
        return None
    return np.array([[_complex(x) for x in row] for row in rows], dtype=np.complex128).reshape(len(rows), -1)


def _mask(rows) -> np.ndarray | None:
    return None if rows is None else np.array(rows, dtype=bool).reshape(len(rows), -1)


def _positions(xs) -> tuple | None:
    return None if xs is None else tuple(xs)


def _encode(x: np.ndarray) -> list:
    arr = np.asarray(x, dtype=np.complex128)
    if arr.ndim == 1:
        return [[float(z.real), float(z.imag)] for z in arr]
    return [_encode(row) for row in arr]


def network_from_document(doc: dict):
    """Build an RBM, DBM, feed-forward network or quasi-product cover from a parsed document."""
    validate_document(doc)
    n = doc["n_visible"]
    g = LatticeGeometry.from_dict(doc["lattice"]) if "lattice" in doc else None
    if g is not None and g.n_sites != n:
        raise InputError(f"spec field $.lattice: {g.n_sites} sites but n_visible is {n}")
    alph = doc.get("alphabets", {})
    visible = Alphabet(alph.get("visible", Alphabet.PLUS_MINUS.value))
    hidden = Alphabet(alph["hidden"]) if "hidden" in alph else None
    loc = doc.get("locality")
    kind = doc["kind"]
    try:
        if kind == "quasi_product":
            return ClusterCover.from_dict({"n_sites": n, "alphabet": doc.get("alphabet", "plus_minus"),
                                           "clusters": doc["clusters"]})
        if "random" in doc:
            r = doc["random"]
            locality = Locality.k_local(loc["eps"], loc.get("k")) if loc else Locality.dense()
            if kind == "ffnn":
                raise InputError("spec field $.random: random generation covers rbm and dbm only")
            return random_network(kind, n, locality, r["seed"], r.get("scale", 1.0), m=r.get("n_hidden"),
                                  n_deep=r.get("n_deep"), geometry=g, hidden_alphabet=hidden,
                                  visible_alphabet=visible)
        if kind == "rbm":
            m = doc["n_hidden"]
            mask = _mask(doc.get("mask"))
            if mask is None and loc and g is not None:
                mask = local_mask(g, n, doc.get("hidden_positions") or list(range(m)),
                                  Locality.k_local(loc["eps"], loc.get("k")))
            return RbmSpec(n, m, _cvec(doc.get("a")), _cvec(doc.get("b")), _cmat(doc["W"]), mask,
                           hidden_alphabet=hidden or Alphabet.PLUS_MINUS, visible_alphabet=visible,
                           hidden_positions=_positions(doc.get("hidden_positions")), geometry=g)
        if kind == "dbm":
            return DbmSpec(n, doc["n_shallow"], doc["n_deep"], _cvec(doc.get("a")), _cvec(doc.get("b")),
                           _cvec(doc.get("c")), _cmat(doc["W_vh"]), _cmat(doc["W_hg"]),
                           _mask(doc.get("mask_vh")), _mask(doc.get("mask_hg")),
                           hidden_alphabet=hidden or Alphabet.ZERO_ONE, visible_alphabet=visible,
                           shallow_positions=_positions(doc.get("shallow_positions")),
                           deep_positions=_positions(doc.get("deep_positions")), geometry=g)
        layers = []
        n_in = n
        for k, layer in enumerate(doc["layers"]):
            acts = layer["activations"]
            acts = tuple(acts) if isinstance(acts, list) else (acts,)
            layers.append(FfnnLayer(n_in, layer["n_out"], _cmat(layer["weights"]), _cvec(layer.get("bias")),
                                    acts, _mask(layer.get("mask")), _positions(layer.get("positions"))))
            n_in = layer["n_out"]
        return FeedForwardSpec(tuple(layers), visible_alphabet=visible, geometry=g)
    except ValueError as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"spec is inconsistent: {exc}") from exc


def load_network(path: str | Path):
    try:
        doc = json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise InputError(f"spec file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"spec file {path} is not valid JSON: {exc}") from exc
    return network_from_document(doc)


def network_to_document(spec) -> dict:
    """Explicit-weight document for an RBM or DBM (inverse of :func:`network_from_document`)."""
    doc: dict[str, Any] = {"kind": spec.kind, "n_visible": spec.n_visible}
    if spec.geometry is not None:
        doc["lattice"] = spec.geometry.to_dict()
    doc["alphabets"] = {"visible": spec.visible_alphabet.value, "hidden": spec.hidden_alphabet.value}
    if isinstance(spec, RbmSpec):
        doc.update(n_hidden=spec.n_hidden, a=_encode(spec.a), b=_encode(spec.b), W=_encode(spec.W),
                   mask=spec.mask.astype(int).tolist())
        if spec.hidden_positions is not None:
            doc["hidden_positions"] = list(spec.hidden_positions)
        return doc
    if isinstance(spec, DbmSpec):
        doc.update(n_shallow=spec.n_shallow, n_deep=spec.n_deep, a=_encode(spec.a), b=_encode(spec.b),
                   c=_encode(spec.c), W_vh=_encode(spec.W_vh), W_hg=_encode(spec.W_hg),
                   mask_vh=spec.mask_vh.astype(int).tolist(), mask_hg=spec.mask_hg.astype(int).tolist())
        if spec.shallow_positions is not None:
            doc["shallow_positions"] = list(spec.shallow_positions)
        if spec.deep_positions is not None:
            doc["deep_positions"] = list(spec.deep_positions)
        return doc
    raise ConfigurationError(f"cannot serialize {type(spec).__name__}")
