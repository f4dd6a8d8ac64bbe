"""Discrete null rays and the sparse light-ray-transform matrix.

Every node of the ``t = 0`` plane is a point source and every active node of
the ``t = t_final`` plane a receiver.  A (source, detector) pair forms a ray
when the spatial distance between the two nodes is within ``dx/2`` of
``t_final``, i.e. the pair is joined by a unit-speed (null) path.  The ray is
sampled at the stored slice times and deposited with bilinear weights times
``dt`` (midpoint rule for the time integral).
"""
import re
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .grid import GridSpec, bilinear_stencil


@dataclass(frozen=True)
class DetectorMask:
    """Boolean mask of active detectors on the ``t = t_final`` plane."""

    active: np.ndarray
    description: str = "custom"

    def __post_init__(self):
        if not np.any(self.active):
            raise ValueError("detector mask has no active detector")

    @classmethod
    def full(cls, spec):
        return cls(np.ones(spec.size, dtype=bool), "full")

    @classmethod
    def centered(cls, spec, k):
        """Centered ``k x k`` block of detectors (``k`` odd)."""
        if k % 2 == 0 or k < 1 or k > spec.n:
            raise ValueError(f"centered mask size must be odd and <= n, got {k}")
        if k == spec.n:
            return cls.full(spec)
        c, h = spec.n // 2, k // 2
        i, j = spec.unravel(np.arange(spec.size))
        active = (np.abs(i - c) <= h) & (np.abs(j - c) <= h)
        return cls(active, f"{k}x{k}")

    @classmethod
    def from_label(cls, spec, label):
        """Parse ``"full"`` or ``"KxK"``."""
        label = label.strip().lower()
        if label == "full":
            return cls.full(spec)
        m = re.fullmatch(r"(\d+)x(\d+)", label)
        if not m or m.group(1) != m.group(2):
            raise ValueError(f"unknown detector mask label {label!r}")
        return cls.centered(spec, int(m.group(1)))

    @property
    def count(self):
        return int(np.count_nonzero(self.active))


@dataclass(frozen=True)
class Ray:
    source_index: int
    detector_index: int
    direction: np.ndarray
    samples: list = field(repr=False)


def null_offsets(spec, tolerance=None):
    """Integer node offsets ``(di, dj)`` whose length is within ``tolerance`` of ``t_final``.

    Sorted by polar angle, which fixes the order of rays within a source.
    """
    tol = 0.5 * spec.dx if tolerance is None else tolerance
    reach = int(np.ceil((spec.t_final + tol) / spec.dx)) + 1
    r = np.arange(-reach, reach + 1)
    di, dj = np.meshgrid(r, r)
    di, dj = di.ravel(), dj.ravel()
    keep = np.abs(np.hypot(di, dj) * spec.dx - spec.t_final) <= tol
    di, dj = di[keep], dj[keep]
    order = np.lexsort((np.hypot(di, dj), np.arctan2(dj, di)))
    return di[order], dj[order]


class RayTable:
    """Array-backed list of rays, grouped by source in increasing flat index.

    Indexing returns :class:`Ray` objects with their samples computed on demand.
    """

    def __init__(self, spec, sources, detectors):
        self.spec = spec
        self.sources = np.asarray(sources, dtype=np.int64)
        self.detectors = np.asarray(detectors, dtype=np.int64)
        x, y = spec.coordinates()
        d = np.stack([x[self.detectors] - x[self.sources], y[self.detectors] - y[self.sources]], axis=1)
        if len(d):
            d /= np.linalg.norm(d, axis=1, keepdims=True)
        self.directions = d.reshape(-1, 2)

    def __len__(self):
        return len(self.sources)

    def __iter__(self):
        return (self[r] for r in range(len(self)))

    def __getitem__(self, r):
        index, weight, inside = self.sample_stencils(np.array([r]))
        samples = []
        for t in range(self.spec.n_slices):
            if inside[0, t]:
                samples.append([(int(k), float(w)) for k, w in zip(index[0, t], weight[0, t]) if w > 0])
            else:
                samples.append([])
        return Ray(int(self.sources[r]), int(self.detectors[r]), self.directions[r].copy(), samples)

    def sample_stencils(self, rows=None):
        """Bilinear stencils of the slice samples.

        Returns ``(index, weight, inside)`` with shapes ``(k, N, 4)``,
        ``(k, N, 4)`` and ``(k, N)`` for ``k`` selected rays and ``N`` slices.
        """
        rows = np.arange(len(self)) if rows is None else np.asarray(rows)
        x, y = self.spec.coordinates()
        t = self.spec.slice_times()
        src = self.sources[rows]
        v = self.directions[rows]
        px = x[src][:, None] + t[None, :] * v[:, 0:1]
        py = y[src][:, None] + t[None, :] * v[:, 1:2]
        return bilinear_stencil(self.spec, px, py)

    def counts_per_source(self):
        return np.bincount(self.sources, minlength=self.spec.size)


def enumerate_rays(spec: GridSpec, mask: DetectorMask, tolerance=None):
    """All null rays from grid sources to active detectors."""
    di, dj = null_offsets(spec, tolerance)
    n = spec.n
    si, sj = spec.unravel(np.arange(spec.size))
    ti = si[:, None] + di[None, :]
    tj = sj[:, None] + dj[None, :]
    ok = (ti >= 0) & (ti < n) & (tj >= 0) & (tj < n)
    det = np.where(ok, tj * n + ti, 0)
    ok &= mask.active[det]
    # row-major over (source, offset) keeps rays grouped by source
    src = np.broadcast_to(np.arange(spec.size)[:, None], ok.shape)[ok]
    return RayTable(spec, src, det[ok])


@dataclass
class RaySystem:
    """Rays together with their sparse observation matrix ``H``."""

    rays: RayTable
    matrix: sp.csr_matrix

    @property
    def m(self):
        return self.matrix.shape[0]

    @property
    def m_i(self):
        return self.rays.counts_per_source()

    @property
    def spec(self):
        return self.rays.spec

    def apply(self, u):
        u = np.asarray(u, dtype=float)
        if u.shape[0] != self.matrix.shape[1]:
            raise ValueError(f"field has length {u.shape[0]}, expected {self.matrix.shape[1]}")
        return self.matrix @ u

    def apply_adjoint(self, b):
        b = np.asarray(b, dtype=float)
        if b.shape[0] != self.matrix.shape[0]:
            raise ValueError(f"data has length {b.shape[0]}, expected {self.matrix.shape[0]}")
        return self.matrix.T @ b


def build_ray_matrix(spec: GridSpec, rays: RayTable, chunk=16384):
    """Assemble ``H`` (one row per ray, columns over the space-time field)."""
    m, N, size = len(rays), spec.n_slices, spec.size
    shape = (m, N * size)
    if m == 0:
        return RaySystem(rays, sp.csr_matrix(shape))
    offsets = (np.arange(N) * size)[None, :, None]
    blocks = []
    for start in range(0, m, chunk):
        rows = np.arange(start, min(start + chunk, m))
        index, weight, inside = rays.sample_stencils(rows)
        cols = index + offsets
        r = np.broadcast_to((rows - start)[:, None, None], cols.shape)
        keep = inside[..., None] & (weight > 0)
        blocks.append(sp.csr_matrix(
            (spec.dt * weight[keep], (r[keep], cols[keep])), shape=(len(rows), shape[1])
        ))
    H = sp.vstack(blocks, format="csr")
    H.sum_duplicates()
    H.sort_indices()
    return RaySystem(rays, H)


def ray_apply(sys, u):
    return sys.apply(u)


def ray_apply_adjoint(sys, b):
    return sys.apply_adjoint(b)


def build_ray_system(spec, mask, tolerance=None):
    return build_ray_matrix(spec, enumerate_rays(spec, mask, tolerance))
