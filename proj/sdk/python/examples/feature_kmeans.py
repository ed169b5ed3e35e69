#!/usr/bin/env python3
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
"""Example runner: k-means on neighbourhood-smoothed node features.

    python3 feature_kmeans.py --self-test
    python3 feature_kmeans.py --print-spec > feature_kmeans.json
"""

import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1]))

from commbench_runner import ModelAdapter, serve  # noqa: E402


def smooth(graph, hops):
    x = graph.features
    if x.shape[1] == 0:
        x = np.eye(graph.n)
    x = (x - x.mean(axis=0)) / (x.std(axis=0) + 1e-12)
    if hops:
        a = graph.adjacency() + np.eye(graph.n)
        a /= a.sum(axis=1, keepdims=True)
        for _ in range(hops):
            x = a @ x
    return x


def kmeans(x, k, rng, budget):
    # k-means++ seeding
    centres = [x[rng.integers(len(x))]]
    for _ in range(1, k):
        d2 = np.min([((x - c) ** 2).sum(axis=1) for c in centres], axis=0)
        total = d2.sum()
        centres.append(x[rng.choice(len(x), p=d2 / total)] if total > 0 else x[rng.integers(len(x))])
    centres = np.array(centres)

    stopper = budget.stopper()
    assign = np.zeros(len(x), dtype=np.int64)
    epochs = 0
    for epochs in range(1, budget.max_epochs + 1):
        d2 = ((x[:, None, :] - centres[None, :, :]) ** 2).sum(axis=2)
        assign = d2.argmin(axis=1)
        inertia = d2[np.arange(len(x)), assign].sum()
        for c in range(k):
            members = x[assign == c]
            if len(members):
                centres[c] = members.mean(axis=0)
        if stopper.step(-inertia):
            break
    return assign, inertia, epochs


def train(graph, params, seed, budget, splits):
    x = smooth(graph, int(params.get("hops", 1)))
    rng = np.random.default_rng(seed)
    best, best_inertia, used = None, np.inf, 0
    for _ in range(int(params.get("n_init", 4))):
        assign, inertia, epochs = kmeans(x, graph.k, rng, budget)
        used += epochs
        if inertia < best_inertia:
            best, best_inertia = assign, inertia
    return best, used


ADAPTER = ModelAdapter(
    name="feature-kmeans",
    train=train,
    search_space=[
        {"name": "hops", "kind": "int-uniform", "low": 0, "high": 2},
        {"name": "n_init", "kind": "categorical", "choices": [1, 4, 8]},
    ],
    defaults={"hops": 1, "n_init": 4},
)

if __name__ == "__main__":
    serve(ADAPTER)
