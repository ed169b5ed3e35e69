# Copyright 2026 The commbench Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Reads a dataset bundle directory into numpy arrays."""

import dataclasses
import pathlib
import struct

import numpy as np

FEATURE_MAGIC = b"CBFEAT01"


@dataclasses.dataclass
class GraphData:
    name: str
    n: int
    k: int
    edges: np.ndarray          # (m, 2) int64, as listed in edges.txt
    weights: np.ndarray        # (m,) float64
    features: np.ndarray       # (n, d) float64
    labels: np.ndarray | None  # (n,) int64, or None when unlabelled
    directed: bool = False

    def adjacency(self):
        """Dense symmetric weighted adjacency matrix, self-loops dropped."""
        a = np.zeros((self.n, self.n))
        keep = self.edges[:, 0] != self.edges[:, 1]
        u, v, w = self.edges[keep, 0], self.edges[keep, 1], self.weights[keep]
        a[u, v] = w
        a[v, u] = w
        return a


def _rows(path):
    for line in path.read_text(encoding="utf-8").splitlines():
        fields = line.split("#", 1)[0].split()
        if fields:
            yield fields


def _meta(path):
    out = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        body = line.split("#", 1)[0].strip()
        if body:
            key, sep, value = body.partition("=")
            if not sep:
                raise ValueError(f"{path}: expected 'key = value', got {line!r}")
            out[key.strip()] = value.strip()
    return out


def _binary_features(path):
    data = path.read_bytes()
    if data[:8] != FEATURE_MAGIC:
        raise ValueError(f"{path}: not a binary feature matrix")
    rows, cols = struct.unpack_from("<QQ", data, 8)
    values = np.frombuffer(data, dtype="<f8", count=rows * cols, offset=24)
    return values.reshape(rows, cols).astype(np.float64)


def load_bundle(path):
    path = pathlib.Path(path)
    meta = _meta(path / "meta.txt")
    n = int(meta["n"])
    k = int(meta["k"])
    d = int(meta["d"]) if "d" in meta else None

    edge_rows = list(_rows(path / "edges.txt"))
    edges = np.array([[int(r[0]), int(r[1])] for r in edge_rows], dtype=np.int64).reshape(-1, 2)
    weights = np.array([float(r[2]) if len(r) > 2 else 1.0 for r in edge_rows])
    if edges.size and (edges.min() < 0 or edges.max() >= n):
        raise ValueError(f"{path}/edges.txt: node id outside [0, {n})")

    if d == 0:
        features = np.zeros((n, 0))
    elif (path / "features.bin").exists():
        features = _binary_features(path / "features.bin")
    else:
        features = np.array([[float(x) for x in r] for r in _rows(path / "features.txt")])
    features = features.reshape(n, -1) if features.size == 0 else features
    if features.shape[0] != n:
        raise ValueError(f"{path}: feature matrix has {features.shape[0]} rows for {n} nodes")

    labels = None
    if (path / "labels.txt").exists():
        labels = np.array([int(x) for r in _rows(path / "labels.txt") for x in r], dtype=np.int64)
    return GraphData(name=meta.get("name", path.name), n=n, k=k, edges=edges, weights=weights,
                     features=features, labels=labels,
                     directed=meta.get("directed") == "true")
