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
"""Local conformance check, run in-process over the same framing the harness
uses. The phases match ``commbench validate-runner``."""

import dataclasses
import io
import pathlib
import tempfile

import numpy as np

from . import framing
from .serve import serve_streams


@dataclasses.dataclass
class Phase:
    name: str
    passed: bool
    detail: str


def write_planted_bundle(path, nodes=24, blocks=2, p_in=0.5, p_out=0.05, dim=4, seed=1):
    """Writes a small planted-partition bundle and returns its labels."""
    rng = np.random.default_rng(seed)
    labels = np.arange(nodes) % blocks
    edges = []
    for u in range(nodes):
        for v in range(u + 1, nodes):
            if rng.random() < (p_in if labels[u] == labels[v] else p_out):
                edges.append((u, v))
    centres = rng.normal(scale=3.0, size=(blocks, dim))
    features = centres[labels] + rng.normal(size=(nodes, dim))
    path = pathlib.Path(path)
    path.mkdir(parents=True, exist_ok=True)
    (path / "meta.txt").write_text(
        f"name = selftest\nn = {nodes}\nd = {dim}\nk = {blocks}\nclasses = {blocks}\n"
        "edge_convention = undirected\n")
    (path / "edges.txt").write_text("".join(f"{u} {v}\n" for u, v in edges))
    (path / "features.txt").write_text(
        "".join(" ".join(repr(float(x)) for x in row) + "\n" for row in features))
    (path / "labels.txt").write_text("".join(f"{l}\n" for l in labels))
    return labels


def exchange(adapter, messages):
    """Feeds framed messages to a fresh serve loop; returns (exit, replies)."""
    inp = io.BytesIO(b"".join(framing.encode(m) for m in messages))
    out = io.BytesIO()
    code = serve_streams(adapter, inp, out)
    out.seek(0)
    replies = []
    while (m := framing.read_message(out)) is not None:
        replies.append(m)
    return code, replies


def self_test(adapter):
    phases = []

    def phase(name, ok, detail):
        phases.append(Phase(name, ok, detail))
        return ok

    hello = {"type": "hello", "protocol": framing.PROTOCOL_VERSION, "name": "selftest"}
    with tempfile.TemporaryDirectory(prefix="commbench-selftest-") as tmp:
        labels = write_planted_bundle(tmp)
        n = len(labels)
        order = np.random.default_rng(42).permutation(n)
        cut = int(0.8 * n)
        req = {"type": "train", "dataset_path": tmp, "params": dict(adapter.defaults),
               "seed": 42, "max_epochs": 50, "patience": 10, "k": 2,
               "train_nodes": sorted(int(x) for x in order[:cut]),
               "val_nodes": sorted(int(x) for x in order[cut:])}

        code, replies = exchange(adapter, [hello])
        ok = code == 0 and len(replies) == 1 and replies[0].get("type") == "hello_ack"
        if not phase("handshake", ok, "hello_ack received, clean exit" if ok
                     else f"exit {code}, replies {replies!r}"):
            return phases

        def train(r):
            code, replies = exchange(adapter, [hello, r])
            if code != 0 or len(replies) != 2:
                return None, f"exit {code}, replies {replies!r}"
            return replies[1], ""

        first, why = train(req)
        if first is None:
            phase("round-trip", False, why)
            return phases
        if not phase("round-trip", first["status"] == "ok",
                     f"ok result in {first['wall_time']:.3f} s" if first["status"] == "ok"
                     else f"status {first['status']}: {first.get('error', '')}"):
            return phases
        p = first["partition"]
        ok = len(p) == n and all(0 <= x < 2 for x in p)
        if not phase("response-validation", ok,
                     f"partition of length {n} with values in [0, 2)" if ok
                     else f"partition {p!r} is not a valid {n}-node 2-way partition"):
            return phases
        second, why = train(req)
        same = second is not None and second["partition"] == p
        if not phase("determinism", same, "identical partitions for seed 42" if same
                     else "partitions differ between two runs with seed 42"):
            return phases
        injected, why = train({**req, "k": 0})
        ok = injected is not None and injected["status"] != "ok"
        phase("failure-injection", ok,
              f"k = 0 answered with status {injected['status']}" if ok
              else f"k = 0 answered with {injected['status'] if injected else why}")
    return phases
