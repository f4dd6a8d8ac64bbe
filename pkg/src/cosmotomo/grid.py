"""Space-time mesh shared by the wave solver, the ray tracer and the solvers.

Images are flattened row-major with x varying fastest: the node ``(i, j)``
at ``(x_i, y_j)`` lives at flat index ``j * n + i``.  Reshaping a flat image
to ``(n, n)`` therefore gives an array indexed ``[j, i]`` (rows are y).
"""
from dataclasses import dataclass

import numpy as np

_SNAP = 1e-12


class GridError(ValueError):
    """Invalid grid parameters."""


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid on ``[-extent, extent]^2 x [0, t_final]``.

    Parameters
    ----------
    n : int
        Nodes per spatial axis (so ``n**2`` unknowns).
    extent : float
        Spatial half-width of the square domain.
    t_final : float
        Time of the detector plane.
    n_slices : int
        Number of leapfrog steps, one stored time slice per step.
    """

    n: int
    extent: float = 7.0
    t_final: float = 2.0
    n_slices: int = 40

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise GridError(f"n must be an integer >= 3, got {self.n!r}")
        if int(self.n_slices) != self.n_slices or self.n_slices < 1:
            raise GridError(f"n_slices must be an integer >= 1, got {self.n_slices!r}")
        if not self.extent > 0 or not self.t_final > 0:
            raise GridError("extent and t_final must be positive")
        c = self.courant * np.sqrt(2.0)
        if c > 1.0:
            raise GridError(
                f"CFL condition violated: sigma*sqrt(2) = {c:.6g} > 1 "
                f"(dt = {self.dt:.6g}, dx = {self.dx:.6g})"
            )

    @property
    def dx(self):
        return 2.0 * self.extent / (self.n - 1)

    @property
    def dt(self):
        return self.t_final / self.n_slices

    @property
    def courant(self):
        """Courant number ``dt / dx`` (same in both axes)."""
        return self.dt / self.dx

    @property
    def size(self):
        """Number of spatial nodes, ``n**2``."""
        return self.n * self.n

    @property
    def spacetime_size(self):
        return self.n * self.n * self.n_slices

    @property
    def axis(self):
        """Node coordinates along one axis."""
        return np.linspace(-self.extent, self.extent, self.n)

    def coordinates(self):
        """Return ``(x, y)`` arrays of length ``n**2`` in flat order."""
        xs = self.axis
        x, y = np.meshgrid(xs, xs)  # x varies along axis 1
        return x.ravel(), y.ravel()

    def slice_times(self):
        """Midpoint times ``(tau - 1/2) * dt`` of the stored slices."""
        return (np.arange(1, self.n_slices + 1) - 0.5) * self.dt

    def flat_index(self, i, j):
        return np.asarray(j) * self.n + np.asarray(i)

    def unravel(self, k):
        """Inverse of :meth:`flat_index`; returns ``(i, j)``."""
        j, i = np.divmod(np.asarray(k), self.n)
        return i, j

    def to_image(self, values):
        """View a flat image as an ``(n, n)`` array indexed ``[j, i]``."""
        return np.asarray(values).reshape(self.n, self.n)


def make_grid(n, extent=7.0, t_final=2.0, n_slices=40):
    return GridSpec(n=n, extent=extent, t_final=t_final, n_slices=n_slices)


def _cell_coords(spec, px, py):
    """Continuous node coordinates of points; ``nan`` marks out-of-hull points."""
    gx = (np.asarray(px, dtype=float) + spec.extent) / spec.dx
    gy = (np.asarray(py, dtype=float) + spec.extent) / spec.dx
    # snap round-off so nodes and the far boundary are hit exactly
    rx, ry = np.rint(gx), np.rint(gy)
    gx = np.where(np.abs(gx - rx) < _SNAP, rx, gx)
    gy = np.where(np.abs(gy - ry) < _SNAP, ry, gy)
    top = spec.n - 1
    inside = (gx >= 0) & (gx <= top) & (gy >= 0) & (gy <= top)
    return gx, gy, inside


def bilinear_stencil(spec, px, py):
    """Vectorized bilinear weights.

    Returns ``(index, weight, inside)`` where ``index`` and ``weight`` have
    shape ``(k, 4)`` for ``k`` points.  Rows of out-of-hull points are zero
    weight; corners with zero weight keep a valid (clipped) index.
    """
    gx, gy, inside = _cell_coords(spec, px, py)
    top = spec.n - 1
    i0 = np.clip(np.floor(np.where(inside, gx, 0)), 0, top - 1).astype(np.int64)
    j0 = np.clip(np.floor(np.where(inside, gy, 0)), 0, top - 1).astype(np.int64)
    fx = np.where(inside, gx - i0, 0.0)
    fy = np.where(inside, gy - j0, 0.0)
    base = j0 * spec.n + i0
    index = np.stack([base, base + 1, base + spec.n, base + spec.n + 1], axis=-1)
    weight = np.stack(
        [(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy], axis=-1
    )
    weight = np.where(inside[..., None], weight, 0.0)
    return index, weight, inside


def bilinear_weights(spec, point):
    """Bilinear interpolation weights of a single point.

    Returns a list of ``(flat_index, weight)`` pairs with positive weights.
    The list is empty when the point lies outside ``[-extent, extent]^2``.
    """
    index, weight, inside = bilinear_stencil(spec, [point[0]], [point[1]])
    if not inside[0]:
        return []
    return [(int(k), float(w)) for k, w in zip(index[0], weight[0]) if w > 0]
