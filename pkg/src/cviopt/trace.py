"""Run traces: time-indexed metric records emitted by the solvers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class TraceRecord:
    k: int
    wall_ms: float
    evals: int  # block-mapping evaluations consumed so far
    fme: float  # same cost in full-map equivalents
    f_value: float = np.nan
    gap_estimate: float = np.nan
    natural_residual: float = np.nan
    dist_to_xstar: float = np.nan


@dataclass
class RunTrace:
    records: list[TraceRecord] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def append(self, rec: TraceRecord):
        if self.records and rec.k <= self.records[-1].k:
            raise ValueError("record iteration counters must be strictly increasing")
        if self.records and rec.evals < self.records[-1].evals:
            raise ValueError("evaluation counter must be nondecreasing")
        self.records.append(rec)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records], dtype=float)

    @property
    def ks(self) -> np.ndarray:
        return np.array([r.k for r in self.records], dtype=int)

    def __len__(self) -> int:
        return len(self.records)
