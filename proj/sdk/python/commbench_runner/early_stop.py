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
"""Early stopping on a per-epoch validation score."""


class EarlyStopper:
    """Feed one score per epoch (higher is better). ``step`` returns True once
    ``patience`` consecutive epochs have passed without a strict improvement."""

    def __init__(self, patience):
        if patience <= 0:
            raise ValueError("patience must be positive")
        self.patience = patience
        self.best = None
        self.best_epoch = -1
        self.epochs = 0
        self.stale = 0

    def step(self, score):
        if self.best is None or score > self.best:
            self.best = score
            self.best_epoch = self.epochs
            self.stale = 0
        else:
            self.stale += 1
        self.epochs += 1
        return self.should_stop

    @property
    def should_stop(self):
        return self.stale >= self.patience


def early_stopper(patience):
    return EarlyStopper(patience)
