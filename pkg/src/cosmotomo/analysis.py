"""Spectral diagnostics of the forward matrix and the visible-set geometry."""
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .grid import GridSpec
from .model import ForwardModel
from .raytrace import DetectorMask


@dataclass(frozen=True)
class SpectrumData:
    singular_values: np.ndarray
    rank_tolerance: float
    kappa: float  # math.inf when numerically rank deficient

    @property
    def rank(self):
        s = self.singular_values
        if len(s) == 0 or s[0] == 0:
            return 0
        return int(np.count_nonzero(s > self.rank_tolerance * s[0]))

    @property
    def is_singular(self):
        return np.isinf(self.kappa)


@dataclass(frozen=True)
class PicardData:
    sigma: np.ndarray
    coef: np.ndarray  # |u_i^T b|
    solcoef: np.ndarray  # |u_i^T b| / sigma_i

    def __len__(self):
        return len(self.sigma)


def _gram_eigen(A):
    """Eigenpairs of the smaller Gram matrix, descending.

    Returns ``(lam, V, side)`` with ``side`` ``"right"`` for ``A^T A`` and
    ``"left"`` for ``A A^T``.
    """
    m, n = A.shape
    if m >= n:
        lam, V = np.linalg.eigh(A.T @ A)
        side = "right"
    else:
        lam, V = np.linalg.eigh(A @ A.T)
        side = "left"
    return lam[::-1], V[:, ::-1], side


def _spectrum(lam, n_cols, rank_tolerance):
    s = np.sqrt(np.clip(lam, 0.0, None))
    # a wide matrix has at least n_cols - m exactly zero singular values
    s = np.concatenate([s, np.zeros(max(0, n_cols - len(s)))])
    smax = s[0] if len(s) else 0.0
    smin = s[-1] if len(s) else 0.0
    kappa = smax / smin if smax > 0 and smin > rank_tolerance * smax else np.inf
    return SpectrumData(s, rank_tolerance, float(kappa))


def singular_spectrum(A, rank_tolerance=1e-12):
    """Singular values of ``A`` (all ``min``-side values plus structural zeros).

    Uses the eigenvalues of the smaller Gram matrix.  Accepts a dense array
    or a :class:`ForwardModel`; tall models are reduced blockwise to
    ``A^T A`` without ever holding ``A``.
    """
    if isinstance(A, ForwardModel):
        m, n = A.shape
        if m >= n:
            lam = np.linalg.eigvalsh(A.gram())[::-1]
            return _spectrum(lam, n, rank_tolerance)
        A = A.assemble()
    A = np.asarray(A, dtype=float)
    lam, _, _ = _gram_eigen(A)
    return _spectrum(lam, A.shape[1], rank_tolerance)


def spectrum_from_gram(G, rank_tolerance=1e-12):
    lam = np.linalg.eigvalsh(G)[::-1]
    return _spectrum(lam, G.shape[0], rank_tolerance)


def picard_data(A, b, rank_tolerance=1e-12):
    """Picard-plot triples ``(sigma_i, |u_i^T b|, |u_i^T b| / sigma_i)``.

    Only components with ``sigma_i > rank_tolerance * sigma_max`` are kept.
    """
    if isinstance(A, ForwardModel):
        A = A.assemble()
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    lam, V, side = _gram_eigen(A)
    s = np.sqrt(np.clip(lam, 0.0, None))
    keep = s > rank_tolerance * s[0]
    s, V = s[keep], V[:, keep]
    if side == "left":
        coef = np.abs(V.T @ b)
    else:
        # u_i = A v_i / sigma_i
        coef = np.abs(V.T @ (A.T @ b)) / s
    return PicardData(s, coef, coef / s)


@dataclass(frozen=True)
class VisibleMask:
    mask: np.ndarray
    tolerance: float

    @property
    def fraction(self):
        return float(np.mean(self.mask))


def visible_mask(spec: GridSpec, mask: DetectorMask, tolerance=None):
    """Nodes lying within ``tolerance`` of a radius-``t_final`` circle around an active detector.

    Those are the sources of the observed null rays.  Computed as a binary
    dilation of the detector mask by a discrete annulus.
    """
    tol = 0.5 * spec.dx if tolerance is None else float(tolerance)
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    reach = int(np.ceil((spec.t_final + tol) / spec.dx))
    r = np.arange(-reach, reach + 1)
    di, dj = np.meshgrid(r, r)
    ring = np.abs(np.hypot(di, dj) * spec.dx - spec.t_final) <= tol
    grid = spec.to_image(mask.active)
    vis = ndimage.binary_dilation(grid, structure=ring, border_value=0)
    return VisibleMask(vis.ravel(), tol)


def masked_relative_error(fhat, ftrue, vmask):
    """Relative errors on the visible and on the non-visible nodes.

    A value is ``None`` when the reference vanishes on that region.
    """
    m = vmask.mask if isinstance(vmask, VisibleMask) else np.asarray(vmask, dtype=bool)
    fhat = np.asarray(fhat, dtype=float)
    ftrue = np.asarray(ftrue, dtype=float)

    def part(sel):
        ref = np.linalg.norm(ftrue[sel])
        if ref == 0:
            return None
        return float(np.linalg.norm(fhat[sel] - ftrue[sel]) / ref)

    return part(m), part(~m)
