from dataclasses import dataclass, field
from typing import Optional

import numpy as np


@dataclass
class SolveHistory:
    """Per-iteration record of an iterative reconstruction.

    ``residual_norms[k]`` is ``||A f_k - b|| / ||b||`` for the ``k``-th
    iterate (1-based iteration ``k + 1``); ``error_norms`` is filled only
    when a reference image was supplied.
    """

    final: np.ndarray
    residual_norms: np.ndarray
    error_norms: Optional[np.ndarray] = None
    iterates: Optional[list] = None
    objective: Optional[np.ndarray] = None
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        self.residual_norms = np.asarray(self.residual_norms, dtype=float)
        if self.error_norms is not None:
            self.error_norms = np.asarray(self.error_norms, dtype=float)
            if len(self.error_norms) != len(self.residual_norms):
                raise ValueError("residual and error histories differ in length")

    def __len__(self):
        return len(self.residual_norms)

    @property
    def best_index(self):
        """Index of the smallest error, or ``None`` without a reference."""
        if self.error_norms is None or len(self.error_norms) == 0:
            return None
        return int(np.argmin(self.error_norms))

    @property
    def best(self):
        k = self.best_index
        if k is None or self.iterates is None:
            return None
        return self.iterates[k]


class Recorder:
    """Accumulates residual/error norms for the solvers."""

    def __init__(self, b, f_true=None, keep_iterates=False):
        self.bnorm = float(np.linalg.norm(b)) or 1.0
        self.f_true = None if f_true is None else np.asarray(f_true, dtype=float)
        self.tnorm = None if f_true is None else float(np.linalg.norm(self.f_true))
        if self.tnorm == 0:
            raise ValueError("reference image is zero")
        self.keep = keep_iterates
        self.res, self.err, self.its = [], [], []

    def __call__(self, f, resnorm):
        self.res.append(resnorm / self.bnorm)
        if self.f_true is not None:
            self.err.append(float(np.linalg.norm(f - self.f_true)) / self.tnorm)
        if self.keep:
            self.its.append(np.array(f, copy=True))

    def history(self, final, **kw):
        return SolveHistory(
            final=final,
            residual_norms=self.res,
            error_norms=self.err if self.f_true is not None else None,
            iterates=self.its if self.keep else None,
            **kw,
        )
