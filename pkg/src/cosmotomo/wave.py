"""Leapfrog solution operator of the 2D wave equation and its adjoint.

The one-step map is ``T = I + s/2 (I kron Tx) + s/2 (Ty kron I)`` with
``s = (dt/dx)**2`` and ``Tx = Ty = tridiag(1, -2, 1)``; neighbours outside
the grid count as zero (lateral Dirichlet condition).  Starting from
``u0 = f`` with zero initial velocity, ``u1 = T u0`` and
``u_k = 2 T u_{k-1} - u_{k-2}``.  Stored slice ``k = 1..N`` is the midpoint
average ``(u_{k-1} + u_k) / 2``, so the slices sit at ``(k - 1/2) dt``.
"""
import warnings

import numpy as np

from .grid import GridSpec


class WavePropagator:
    """Matrix-free discrete solution operator ``S`` for a :class:`GridSpec`.

    Vectors may be 1-D (a single image) or 2-D with images stored in the
    columns, which lets the same code assemble matrices column-blockwise.
    """

    def __init__(self, spec: GridSpec):
        self.spec = spec
        s = spec.courant ** 2
        self._centre = 1.0 - 2.0 * s
        self._side = 0.5 * s

    @property
    def shape(self):
        """Shape ``(n**2 * n_slices, n**2)`` of the solution matrix."""
        return (self.spec.spacetime_size, self.spec.size)

    def _check(self, u, size, what):
        u = np.asarray(u, dtype=float)
        if u.shape[0] != size:
            raise ValueError(f"{what} has leading dimension {u.shape[0]}, expected {size}")
        return u

    def _step(self, u):
        n = self.spec.n
        g = u.reshape((n, n) + u.shape[1:])
        nb = np.zeros_like(g)
        np.add(nb[1:], g[:-1], out=nb[1:])
        np.add(nb[:-1], g[1:], out=nb[:-1])
        np.add(nb[:, 1:], g[:, :-1], out=nb[:, 1:])
        np.add(nb[:, :-1], g[:, 1:], out=nb[:, :-1])
        nb *= self._side
        nb += self._centre * g
        return nb.reshape(u.shape)

    def apply(self, u):
        """Return ``T u``."""
        return self._step(self._check(u, self.spec.size, "image"))

    def states(self, f):
        """Yield the integer-step states ``u_0, u_1, ..., u_N``."""
        f = self._check(f, self.spec.size, "image")
        prev, cur = None, f.copy()
        yield cur
        for k in range(1, self.spec.n_slices + 1):
            nxt = self._step(cur) if k == 1 else 2.0 * self._step(cur) - prev
            prev, cur = cur, nxt
            yield cur

    def slices(self, f):
        """Yield the stored midpoint slices one at a time."""
        it = self.states(f)
        prev = next(it)
        for cur in it:
            yield 0.5 * (prev + cur)
            prev = cur

    def forward(self, f):
        """Space-time field ``S f`` (slice-major concatenation)."""
        return np.concatenate(list(self.slices(f)), axis=0)

    def adjoint(self, r):
        """Return ``S^T r``.

        Every slice map is a Chebyshev polynomial in the symmetric ``T``, so
        the transpose is a Clenshaw recurrence run backwards in time.
        """
        spec = self.spec
        r = self._check(r, spec.spacetime_size, "space-time field")
        N, m = spec.n_slices, spec.size
        blocks = r.reshape((N, m) + r.shape[1:])
        zero = np.zeros_like(blocks[0])

        def coef(k):
            # weight of the k-th Chebyshev term, k = 0..N
            lo = blocks[k - 1] if k >= 1 else zero
            hi = blocks[k] if k < N else zero
            return 0.5 * (lo + hi)

        b1 = np.zeros_like(zero)
        b2 = np.zeros_like(zero)
        for k in range(N, 0, -1):
            b1, b2 = coef(k) + 2.0 * self._step(b1) - b2, b1
        return coef(0) + self._step(b1) - b2

    def reverse(self, u_last, u_prev, steps):
        """Run the recursion backwards from ``(u_k, u_{k-1})`` for ``steps`` steps.

        Returns the state ``u_{k-1-steps}``.
        """
        cur, prev = np.asarray(u_prev, float), np.asarray(u_last, float)
        for _ in range(steps):
            cur, prev = 2.0 * self._step(cur) - prev, cur
        return cur


def propagator_apply(p, u):
    return p.apply(u)


def solve_forward(p, f):
    return p.forward(f)


def solve_adjoint(p, r):
    return p.adjoint(r)


def assemble_solution_matrix(p, max_n=64):
    """Dense solution matrix; column ``j`` is the forward solve of the ``j``-th unit image."""
    if p.spec.n > max_n:
        warnings.warn(
            f"assembling a {p.shape[0]} x {p.shape[1]} dense solution matrix",
            ResourceWarning,
            stacklevel=2,
        )
    return p.forward(np.eye(p.spec.size))
