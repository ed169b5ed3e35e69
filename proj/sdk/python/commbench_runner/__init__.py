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
"""Turns a community-detection model into a commbench protocol v1 runner.

    from commbench_runner import ModelAdapter, serve

    def train(graph, params, seed, budget, splits):
        ...
        return partition            # length graph.n, values in [0, graph.k)

    serve(ModelAdapter(name="my-model", train=train))
"""

from .adapter import Budget, ModelAdapter, Splits
from .bundle import GraphData, load_bundle
from .early_stop import EarlyStopper, early_stopper
from .framing import PROTOCOL_VERSION, ProtocolError, read_message, write_message
from .selftest import self_test
from .serve import seed_everything, serve, serve_streams

__all__ = [
    "Budget", "EarlyStopper", "GraphData", "ModelAdapter", "PROTOCOL_VERSION", "ProtocolError",
    "Splits", "early_stopper", "load_bundle", "read_message", "seed_everything", "self_test",
    "serve", "serve_streams", "write_message",
]
