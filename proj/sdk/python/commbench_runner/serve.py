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
"""The runner process loop."""

import dataclasses
import random
import sys
import time

import numpy as np

from . import framing
from .adapter import Budget, Splits
from .bundle import load_bundle

# Exit status after the harness broke the protocol.
EXIT_PROTOCOL = 3

_TRAIN_FIELDS = ("dataset_path", "params", "seed", "max_epochs", "patience", "k",
                 "train_nodes", "val_nodes")


def seed_everything(seed):
    """Seeds every randomness source the process has loaded."""
    random.seed(seed)
    np.random.seed(seed % 2**32)
    torch = sys.modules.get("torch")
    if torch is not None:
        torch.manual_seed(seed % 2**63)
        if hasattr(torch, "use_deterministic_algorithms"):
            torch.use_deterministic_algorithms(True, warn_only=True)
    tf = sys.modules.get("tensorflow")
    if tf is not None:
        tf.random.set_seed(seed % 2**31)


def _is_oom(exc):
    if isinstance(exc, MemoryError):
        return True
    name = type(exc).__name__
    return "OutOfMemory" in name or "out of memory" in str(exc).lower()


def _check_train(msg):
    for f in _TRAIN_FIELDS:
        if f not in msg:
            raise framing.ProtocolError(f"missing field '{f}'")
    if not isinstance(msg["dataset_path"], str):
        raise framing.ProtocolError("field 'dataset_path' must be a string")
    if not isinstance(msg["params"], dict):
        raise framing.ProtocolError("field 'params' must be an object")
    for f in ("seed", "max_epochs", "patience", "k"):
        if not isinstance(msg[f], int) or isinstance(msg[f], bool):
            raise framing.ProtocolError(f"field '{f}' must be an integer")
    for f in ("train_nodes", "val_nodes"):
        if not isinstance(msg[f], list) or not all(isinstance(x, int) and x >= 0 for x in msg[f]):
            raise framing.ProtocolError(f"field '{f}' must be an array of node ids")


def _partition_problem(p, n, k):
    if p.ndim != 1 or p.shape[0] != n:
        return f"partition has {p.size} entries for {n} nodes"
    bad = np.flatnonzero((p < 0) | (p >= k))
    if bad.size:
        i = int(bad[0])
        return f"partition entry {i} = {int(p[i])} outside [0, {k})"
    return None


def run_request(adapter, msg, cache=None):
    """Answers one train message with a result message."""
    start = time.perf_counter()

    def result(status, partition=(), epochs=0, error=None):
        out = {"type": "result", "status": status, "partition": [int(x) for x in partition],
               "epochs_used": int(epochs), "wall_time": time.perf_counter() - start}
        if error:
            out["error"] = error
        return out

    k = msg["k"]
    if k < 1:
        return result("crash", error=f"k must be at least 1, got {k}")
    try:
        cache = {} if cache is None else cache
        path = msg["dataset_path"]
        if path not in cache:
            cache[path] = load_bundle(path)
        graph = dataclasses.replace(cache[path], k=k)
        seed_everything(msg["seed"])
        out = adapter.train(graph, dict(msg["params"]), msg["seed"],
                            Budget(msg["max_epochs"], msg["patience"]),
                            Splits(np.asarray(msg["train_nodes"], dtype=np.int64),
                                   np.asarray(msg["val_nodes"], dtype=np.int64)))
        epochs = 0
        if isinstance(out, tuple):
            out, epochs = out
        partition = np.asarray(out)
        if partition.size and not np.issubdtype(partition.dtype, np.integer):
            return result("crash", error=f"partition has non-integer dtype {partition.dtype}")
        problem = _partition_problem(partition, graph.n, k)
        if problem:
            return result("crash", error="invalid partition: " + problem)
        return result("ok", partition, epochs)
    except Exception as e:  # noqa: BLE001 - every failure becomes a status
        status = "oom" if _is_oom(e) else "crash"
        return result(status, error=f"{type(e).__name__}: {e}")


def serve_streams(adapter, inp, out):
    """Runs the protocol on binary streams and returns the exit status."""
    def violation(what):
        framing.write_message(out, {"type": "error", "message": what})
        return EXIT_PROTOCOL

    try:
        hello = framing.read_message(inp)
        if hello is None:
            return 0
        if hello.get("type") != "hello":
            return violation("expected hello")
        if hello.get("protocol") != framing.PROTOCOL_VERSION:
            return violation(f"unsupported protocol version {hello.get('protocol')!r}")
        framing.write_message(out, {"type": "hello_ack", "protocol": framing.PROTOCOL_VERSION,
                                    "name": adapter.name})
        cache = {}
        while (msg := framing.read_message(inp)) is not None:
            if msg.get("type") != "train":
                return violation("expected train")
            _check_train(msg)
            framing.write_message(out, run_request(adapter, msg, cache))
    except framing.ProtocolError as e:
        return violation(str(e))
    return 0


def serve(adapter, argv=None):
    """Process entry point. ``--self-test`` runs the local conformance check
    and ``--print-spec`` prints a runner spec for this script instead."""
    argv = sys.argv[1:] if argv is None else argv
    if "--self-test" in argv:
        from .selftest import self_test
        report = self_test(adapter)
        for phase in report:
            print(("PASS " if phase.passed else "FAIL ") + f"{phase.name}: {phase.detail}")
        sys.exit(0 if report and all(p.passed for p in report) else 1)
    if "--print-spec" in argv:
        import json
        import os
        launch = [sys.executable, os.path.abspath(sys.argv[0])]
        print(json.dumps(adapter.runner_spec(launch), indent=2))
        sys.exit(0)
    # Anything the model prints must not corrupt the frames on stdout.
    out = sys.stdout.buffer
    sys.stdout = sys.stderr
    sys.exit(serve_streams(adapter, sys.stdin.buffer, out))
