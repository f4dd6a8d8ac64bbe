"""Forward model ``A = H S``, phantoms, noise and error metrics."""
from dataclasses import dataclass

import numpy as np
from scipy.linalg import blas
from scipy.sparse.linalg import LinearOperator

from .grid import GridSpec
from .raytrace import DetectorMask, RaySystem, build_ray_system
from .wave import WavePropagator

#: default cap on dense matrices built by :meth:`ForwardModel.assemble`
MEMORY_BUDGET = 1 << 30


class BudgetError(MemoryError):
    pass


class ForwardModel:
    """Composition of the wave solution operator and the ray transform."""

    def __init__(self, propagator: WavePropagator, raysys: RaySystem):
        if raysys.matrix.shape[1] != propagator.spec.spacetime_size:
            raise ValueError("ray system and propagator disagree on the space-time size")
        self.propagator = propagator
        self.raysys = raysys

    @classmethod
    def build(cls, spec: GridSpec, mask="full"):
        if isinstance(mask, str):
            mask = DetectorMask.from_label(spec, mask)
        return cls(WavePropagator(spec), build_ray_system(spec, mask))

    @property
    def spec(self):
        return self.propagator.spec

    @property
    def shape(self):
        return (self.raysys.m, self.spec.size)

    def apply(self, f):
        f = np.asarray(f, dtype=float)
        if f.shape[0] != self.spec.size:
            raise ValueError(f"image has length {f.shape[0]}, expected {self.spec.size}")
        # accumulate slice by slice; never holds the whole space-time field
        out = None
        for k, u in enumerate(self.propagator.slices(f)):
            part = self._block(k) @ u
            out = part if out is None else out + part
        return out

    def adjoint(self, b):
        return self.propagator.adjoint(self.raysys.apply_adjoint(b))

    def _block(self, k):
        if not hasattr(self, "_blocks"):
            H, size = self.raysys.matrix.tocsc(), self.spec.size
            self._blocks = [
                H[:, j * size:(j + 1) * size].tocsr() for j in range(self.spec.n_slices)
            ]
        return self._blocks[k]

    def as_operator(self):
        return LinearOperator(self.shape, matvec=self.apply, rmatvec=self.adjoint, dtype=float)

    def assemble(self, rows=None, budget=MEMORY_BUDGET):
        """Dense ``A`` (or the given row range of it)."""
        rows = slice(0, self.shape[0]) if rows is None else rows
        nrows = len(range(*rows.indices(self.shape[0])))
        nbytes = 8 * nrows * self.spec.size
        if nbytes > budget:
            raise BudgetError(
                f"dense A block needs {nbytes / 2**20:.0f} MiB > budget "
                f"{budget / 2**20:.0f} MiB; use gram() or an iterative solver"
            )
        out = np.zeros((nrows, self.spec.size))
        eye = np.eye(self.spec.size)
        for k, u in enumerate(self.propagator.slices(eye)):
            out += self._block(k)[rows] @ u
        return out

    def row_chunks(self, budget=MEMORY_BUDGET // 4):
        step = max(1, budget // (8 * self.spec.size))
        m = self.shape[0]
        return [slice(s, min(s + step, m)) for s in range(0, m, step)]

    def gram(self, b=None, budget=MEMORY_BUDGET // 4):
        """``A^T A`` (and ``A^T b`` when ``b`` is given), built from row blocks of ``A``."""
        size = self.spec.size
        # upper triangle accumulated by the symmetric rank-k update (half the flops of a product)
        G = np.zeros((size, size), order="F")
        Atb = np.zeros(size)
        for rows in self.row_chunks(budget):
            block = self.assemble(rows, budget=budget)
            G = blas.dsyrk(1.0, block.T, beta=1.0, c=G, trans=0, lower=0, overwrite_c=1)
            if b is not None:
                Atb += block.T @ np.asarray(b, dtype=float)[rows]
            del block
        G = np.triu(G) + np.triu(G, 1).T
        return G if b is None else (G, Atb)


def forward_apply(model, f):
    return model.apply(f)


def forward_adjoint(model, b):
    return model.adjoint(b)


@dataclass(frozen=True)
class NoiseSpec:
    level: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("noise level must be non-negative")


@dataclass(frozen=True)
class PhantomSpec:
    """Random test image.

    ``kind`` is ``"dots"`` (isolated pixels) or ``"lines"`` (axis-aligned
    one-pixel lines spanning ``support_box``).  ``support_box`` is
    ``(xmin, xmax, ymin, ymax)``.
    """

    kind: str = "dots"
    count: int = 20
    support_box: tuple = (-3.0, 3.0, -3.0, 3.0)
    amplitude: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("dots", "lines"):
            raise ValueError(f"unknown phantom kind {self.kind!r}")
        if self.count < 0:
            raise ValueError("phantom count must be non-negative")


def make_phantom(spec: PhantomSpec, grid: GridSpec):
    xmin, xmax, ymin, ymax = spec.support_box
    e = grid.extent * (1 + 1e-12)
    if xmin > xmax or ymin > ymax or min(xmin, ymin) < -e or max(xmax, ymax) > e:
        raise ValueError(f"support box {spec.support_box} is not inside the domain")
    axis = grid.axis
    tol = 1e-9 * grid.dx
    ix = np.flatnonzero((axis >= xmin - tol) & (axis <= xmax + tol))
    iy = np.flatnonzero((axis >= ymin - tol) & (axis <= ymax + tol))
    img = np.zeros((grid.n, grid.n))
    rng = np.random.default_rng(spec.seed)
    if spec.kind == "dots":
        avail = len(ix) * len(iy)
        if spec.count > avail:
            raise ValueError(f"{spec.count} dots requested but the box holds {avail} nodes")
        pick = rng.choice(avail, size=spec.count, replace=False)
        jj, ii = np.divmod(pick, len(ix))
        img[iy[jj], ix[ii]] = spec.amplitude
    else:
        avail = len(ix) + len(iy)
        if spec.count > avail:
            raise ValueError(f"{spec.count} lines requested but the box holds {avail}")
        pick = rng.choice(avail, size=spec.count, replace=False)
        for p in pick:
            if p < len(ix):  # vertical line at x = axis[ix[p]]
                img[iy[0]:iy[-1] + 1, ix[p]] = spec.amplitude
            else:
                img[iy[p - len(ix)], ix[0]:ix[-1] + 1] = spec.amplitude
    return img.ravel()


def add_noise(b_clean, spec: NoiseSpec):
    """Return ``(b, e)`` with ``||e|| / ||b_clean||`` equal to ``spec.level``."""
    b_clean = np.asarray(b_clean, dtype=float)
    if spec.level == 0:
        return b_clean.copy(), np.zeros_like(b_clean)
    scale = np.linalg.norm(b_clean)
    if scale == 0:
        raise ValueError("cannot scale noise relative to zero data")
    g = np.random.default_rng(spec.seed).standard_normal(b_clean.shape)
    e = (spec.level * scale / np.linalg.norm(g)) * g
    return b_clean + e, e


def relative_error(fhat, ftrue):
    ftrue = np.asarray(ftrue, dtype=float)
    nrm = np.linalg.norm(ftrue)
    if nrm == 0:
        raise ValueError("relative error undefined for a zero reference")
    return float(np.linalg.norm(np.asarray(fhat, dtype=float) - ftrue) / nrm)
