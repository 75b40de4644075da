"""Cellular network parameterization, datasets, hyperparameters, and the model file format.

A cellular network is k seed vertices (``centers``), one linear function per
cell (``betas``, leading coefficient is the constant term) and one positive
blending scalar per cell (``alphas``). The model file is a JSON document;
see `serialize` / `deserialize`.
"""

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .optim import AdamConfig

REGRESSION = "regression"
BINARY = "binary"
MODES = (REGRESSION, BINARY)

FORMAT_VERSION = 1

# Lower clamp applied to every alpha after an optimizer step: the 1/alpha
# regularizer diverges at 0 and a negative blending extent is meaningless.
ALPHA_FLOOR = 0.01


class ModelFormatError(ValueError):
    """A serialized model document is malformed; the message names the field."""


def _check_parameters(centers, betas, alphas, mode, err=ValueError):
    if centers.ndim != 2 or centers.shape[0] < 1 or centers.shape[1] < 1:
        raise err("centers must be a k x d matrix with k, d >= 1")
    k, d = centers.shape
    if betas.shape != (k, d + 1):
        raise err(f"betas must have shape ({k}, {d + 1}), got {betas.shape}")
    if alphas.shape != (k,):
        raise err(f"alphas must have shape ({k},), got {alphas.shape}")
    if not np.all(alphas > 0):
        raise err("alpha must be positive")
    for name, arr in (("centers", centers), ("betas", betas), ("alphas", alphas)):
        if not np.all(np.isfinite(arr)):
            raise err(f"{name} contains non-finite values")
    if mode not in MODES:
        raise err(f"mode must be one of {MODES}, got {mode!r}")


@dataclass
class CellularNetwork:
    """The learned model: seed vertices, per-cell linear functions, blending scalars.

    Immutable during evaluation; only the trainer's optimizer step mutates it.
    """

    centers: np.ndarray  # (k, d) seed vertices
    betas: np.ndarray    # (k, d+1), column 0 is the constant term
    alphas: np.ndarray   # (k,) positive blending parameters
    mode: str = REGRESSION

    def __post_init__(self):
        self.centers = np.ascontiguousarray(self.centers, dtype=np.float64)
        self.betas = np.ascontiguousarray(self.betas, dtype=np.float64)
        self.alphas = np.ascontiguousarray(self.alphas, dtype=np.float64)
        _check_parameters(self.centers, self.betas, self.alphas, self.mode)

    @property
    def cells(self) -> int:
        return self.centers.shape[0]

    @property
    def dimensions(self) -> int:
        return self.centers.shape[1]

    def copy(self) -> "CellularNetwork":
        return CellularNetwork(
            self.centers.copy(), self.betas.copy(), self.alphas.copy(), self.mode
        )


@dataclass
class OvrModel:
    """Ten binary networks plus their class labels, for one-vs-rest prediction."""

    networks: list
    classes: list

    def __post_init__(self):
        if len(self.networks) != len(self.classes):
            raise ValueError("one network required per class")
        dims = {net.dimensions for net in self.networks}
        if len(dims) > 1:
            raise ValueError("all networks must share dimensions")
        for net in self.networks:
            if net.mode != BINARY:
                raise ValueError("one-vs-rest bundles hold binary networks only")

    @property
    def dimensions(self) -> int:
        return self.networks[0].dimensions


@dataclass
class Dataset:
    """Scattered feature vectors with scalar targets (binary targets in {0, 1})."""

    features: np.ndarray  # (n, d)
    targets: np.ndarray   # (n,)
    meta: dict = None     # optional generator truth for synthetic fixtures

    def __post_init__(self):
        self.features = np.ascontiguousarray(self.features, dtype=np.float64)
        self.targets = np.ascontiguousarray(self.targets, dtype=np.float64)
        if self.features.ndim != 2:
            raise ValueError("features must be an n x d matrix")
        if self.features.shape[0] == 0:
            raise ValueError("empty dataset")
        if self.targets.shape != (self.features.shape[0],):
            raise ValueError("targets must be one scalar per feature vector")
        if not np.all(np.isfinite(self.features)) or not np.all(np.isfinite(self.targets)):
            raise ValueError("dataset contains non-finite values")

    def __len__(self) -> int:
        return self.features.shape[0]

    @property
    def dimensions(self) -> int:
        return self.features.shape[1]

    def require_binary_targets(self):
        if not np.all((self.targets == 0.0) | (self.targets == 1.0)):
            raise ValueError("target not in {0,1}")

    def subset(self, idx) -> "Dataset":
        return Dataset(self.features[idx], self.targets[idx])


@dataclass
class HyperParams:
    cells: int
    lambda_alpha: float = 0.0
    lambda_beta: float = 0.0
    epochs: int = 30
    batch_fraction: float = 0.05
    alpha_init: float = 0.3
    rng_seed: int = 0
    kmeans_iters: int = 100
    optimizer: AdamConfig = field(default_factory=AdamConfig)

    def __post_init__(self):
        if self.cells < 1:
            raise ValueError("cells must be a positive integer")
        if self.lambda_alpha < 0 or self.lambda_beta < 0:
            raise ValueError("regularization strengths must be >= 0")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if not 0.0 < self.batch_fraction <= 1.0:
            raise ValueError("batch_fraction must lie in (0, 1]")
        if not self.alpha_init > 0:
            raise ValueError("alpha_init must be positive")
        if self.kmeans_iters < 1:
            raise ValueError("kmeans_iters must be >= 1")

    def with_(self, **kwargs) -> "HyperParams":
        return replace(self, **kwargs)


def parameter_count(model) -> int:
    """Degrees of freedom: k * 2 * (d+1) per network (d+1 betas, d center coords, 1 alpha)."""
    if isinstance(model, OvrModel):
        return sum(parameter_count(net) for net in model.networks)
    return model.cells * 2 * (model.dimensions + 1)


def _network_doc(net: CellularNetwork) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "mode": net.mode,
        "dimensions": net.dimensions,
        "cells": net.cells,
        "alphas": net.alphas.tolist(),
        "centers": net.centers.tolist(),
        "betas": net.betas.tolist(),
    }


def serialize(model) -> bytes:
    """Encode a network or one-vs-rest bundle as a UTF-8 JSON document.

    Floats are written with Python's shortest round-trip representation, so
    deserialize(serialize(net)) is bit-exact.
    """
    if isinstance(model, OvrModel):
        doc = {
            "format_version": FORMAT_VERSION,
            "classes": [int(c) for c in model.classes],
            "models": [_network_doc(net) for net in model.networks],
        }
    else:
        doc = _network_doc(model)
    return json.dumps(doc, separators=(",", ":")).encode("utf-8")


def _require(doc, key, types):
    if key not in doc:
        raise ModelFormatError(f"missing field {key!r}")
    value = doc[key]
    if not isinstance(value, types):
        raise ModelFormatError(f"field {key!r} has the wrong type")
    return value


def _parse_network(doc) -> CellularNetwork:
    version = _require(doc, "format_version", int)
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported format_version {version}")
    mode = _require(doc, "mode", str)
    if mode not in MODES:
        raise ModelFormatError(f"field 'mode' must be one of {MODES}")
    d = _require(doc, "dimensions", int)
    k = _require(doc, "cells", int)
    if d < 1 or k < 1:
        raise ModelFormatError("fields 'dimensions' and 'cells' must be >= 1")
    try:
        alphas = np.asarray(_require(doc, "alphas", list), dtype=np.float64)
        centers = np.asarray(_require(doc, "centers", list), dtype=np.float64)
        betas = np.asarray(_require(doc, "betas", list), dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ModelFormatError(f"non-numeric or ragged parameter array: {exc}") from exc
    if centers.shape != (k, d):
        raise ModelFormatError(f"field 'centers' must be {k} rows of {d} values")
    if betas.shape != (k, d + 1):
        raise ModelFormatError(f"field 'betas' must be {k} rows of {d + 1} values")
    if alphas.shape != (k,):
        raise ModelFormatError(f"field 'alphas' must hold {k} values")
    _check_parameters(centers, betas, alphas, mode, err=ModelFormatError)
    return CellularNetwork(centers, betas, alphas, mode)


def deserialize(data):
    """Decode a model file back into a CellularNetwork or OvrModel."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ModelFormatError("document must be a JSON object")
    if "classes" in doc:
        version = _require(doc, "format_version", int)
        if version != FORMAT_VERSION:
            raise ModelFormatError(f"unsupported format_version {version}")
        classes = _require(doc, "classes", list)
        models = _require(doc, "models", list)
        if len(classes) != len(models):
            raise ModelFormatError("fields 'classes' and 'models' must have equal length")
        networks = [_parse_network(m) for m in models]
        return OvrModel(networks, [int(c) for c in classes])
    return _parse_network(doc)


def save_model(model, path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize(model))


def load_model(path):
    with open(path, "rb") as fh:
        return deserialize(fh.read())
