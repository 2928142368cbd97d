"""Readers and writers for the on-disk formats.

Space file (JSON)::

    {"n": 3,
     "metric": {"type": "matrix", "data": [[...], ...]}
             | {"type": "euclidean", "coords": [[...], ...], "p": 2}
             | {"type": "graph", "edges": [[i, j, w], ...]}
             | {"type": "snowflake", "inner": <metric>, "alpha": 0.5},
     "weights": [...]}

Function file: JSON (a list of rows, or ``{"values": ..., "vec_norm": q}``)
or CSV with one row per point.  Kernel file: CSV ``n x n``.  Tensor file:
JSON ``{"axes", "weights", "exponents", "values"}`` with ``values``
flattened row-major and the last axis indexing the space.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .functions import FunctionOnSpace
from .generators import euclidean_distances, graph_distances
from .space import MetricMeasureSpace, SpaceError, build_space


def _metric_matrix(metric: dict, n: int) -> np.ndarray:
    kind = metric.get("type")
    if kind == "matrix":
        return np.asarray(metric["data"], dtype=np.float64)
    if kind == "euclidean":
        coords = np.asarray(metric["coords"], dtype=np.float64)
        return euclidean_distances(coords, _exponent(metric.get("p", 2)))
    if kind == "graph":
        return graph_distances(n, metric.get("edges", []))
    if kind == "snowflake":
        alpha = float(metric["alpha"])
        if not 0 < alpha < 1:
            raise SpaceError(f"snowflake exponent must lie in (0, 1), got {alpha}")
        return np.power(_metric_matrix(metric["inner"], n), alpha)
    raise SpaceError(f"unknown metric type {kind!r}")


def _exponent(p) -> float:
    if isinstance(p, str) and p.lower() in ("inf", "infinity"):
        return math.inf
    return float(p)


def space_from_dict(doc: dict, label: str = "") -> MetricMeasureSpace:
    n = int(doc["n"])
    dist = _metric_matrix(doc["metric"], n)
    if dist.shape != (n, n):
        raise SpaceError(f"metric describes {dist.shape[0]} points but n = {n}")
    weights = doc.get("weights")
    return build_space(dist, weights if weights is not None else np.ones(n), label=label)


def space_to_dict(space: MetricMeasureSpace) -> dict:
    return {
        "n": space.n,
        "metric": {"type": "matrix", "data": space.dist.tolist()},
        "weights": space.weight.tolist(),
    }


def load_space(path) -> MetricMeasureSpace:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"space file not found: {path}")
    return space_from_dict(json.loads(path.read_text()), label=path.stem)


def save_space(space: MetricMeasureSpace, path) -> None:
    Path(path).write_text(json.dumps(space_to_dict(space)))


def load_function(path) -> FunctionOnSpace:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"function file not found: {path}")
    if path.suffix.lower() == ".json":
        doc = json.loads(path.read_text())
        if isinstance(doc, dict):
            return FunctionOnSpace(np.asarray(doc["values"], dtype=np.float64), doc.get("vec_norm", 2.0))
        return FunctionOnSpace(np.asarray(doc, dtype=np.float64))
    return FunctionOnSpace(_read_csv(path))


def save_function(f: FunctionOnSpace, path) -> None:
    path = Path(path)
    if path.suffix.lower() == ".json":
        path.write_text(json.dumps({"values": f.values.tolist(), "vec_norm": _num(f.vec_norm)}))
    else:
        write_csv(path, f.values)


def load_kernel(path) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"kernel file not found: {path}")
    K = _read_csv(path)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError(f"kernel must be square, got shape {K.shape}")
    return K


def _read_csv(path: Path) -> np.ndarray:
    rows = []
    with path.open(newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                if rows:
                    raise
                continue  # header line
    return np.atleast_2d(np.asarray(rows, dtype=np.float64))


def write_csv(path, matrix, header=None) -> None:
    matrix = np.atleast_2d(np.asarray(matrix))
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        if header:
            w.writerow(header)
        for row in matrix:
            w.writerow([repr(float(v)) for v in row])


def _num(x):
    return "inf" if x == math.inf else x


def load_tensor(path):
    from .mixed import MixedNormTensor

    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"tensor file not found: {path}")
    return MixedNormTensor.from_dict(json.loads(path.read_text()))


def save_tensor(tensor, path) -> None:
    Path(path).write_text(json.dumps(tensor.to_dict()))
