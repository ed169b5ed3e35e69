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
"""What a model author provides: a training callback plus its search space."""

import dataclasses
from typing import Any, Callable

import numpy as np

from .early_stop import EarlyStopper


@dataclasses.dataclass(frozen=True)
class Budget:
    max_epochs: int
    patience: int

    def stopper(self):
        return EarlyStopper(self.patience)


@dataclasses.dataclass(frozen=True)
class Splits:
    train: np.ndarray
    val: np.ndarray


@dataclasses.dataclass
class ModelAdapter:
    """``train(graph, params, seed, budget, splits)`` returns a partition of
    length ``graph.n`` with values in ``[0, graph.k)``, or a pair
    ``(partition, epochs_used)``. ``graph.k`` is the requested community count.

    ``search_space`` uses the runner spec's JSON layout, for example
    ``{"name": "lr", "kind": "log-uniform", "low": 1e-4, "high": 1e-1}``.
    """

    name: str
    train: Callable[..., Any]
    search_space: list = dataclasses.field(default_factory=list)
    defaults: dict = dataclasses.field(default_factory=dict)
    optimizer_params: bool = False

    def runner_spec(self, launch):
        spec = {"name": self.name, "kind": "external", "launch": list(launch),
                "protocol_version": 1}
        if self.search_space:
            spec["search_space"] = self.search_space
        if self.defaults:
            spec["defaults"] = self.defaults
        if self.optimizer_params:
            spec["optimizer_params"] = True
        return spec
