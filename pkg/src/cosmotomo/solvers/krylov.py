"""Krylov solvers: LSQR for least squares and CG for SPD systems."""
from dataclasses import dataclass

import numpy as np

from .history import Recorder


def lsqr(apply, apply_adjoint, b, max_iters, f_true=None, keep_iterates=False, n=None):
    """LSQR (Golub-Kahan bidiagonalization) from the zero vector.

    The ``k``-th iterate minimizes ``||A f - b||`` over the ``k``-dimensional
    Krylov space ``K_k(A^T A, A^T b)``.  Residual norms are the bidiagonal
    recurrence estimates, which are non-increasing by construction.  The run
    stops early, cleanly, if the bidiagonalization breaks down.

    Parameters
    ----------
    apply, apply_adjoint : callable
        ``f -> A f`` and ``r -> A^T r``.
    b : ndarray
        Data vector.
    max_iters : int
        Iteration cap.
    f_true : ndarray, optional
        Reference image; enables ``error_norms`` and ``best_index``.
    keep_iterates : bool
        Store every iterate in the history.
    n : int, optional
        Number of unknowns, needed only when ``b = 0``.
    """
    b = np.asarray(b, dtype=float)
    rec = Recorder(b, f_true, keep_iterates)
    u = b.copy()
    beta = np.linalg.norm(u)
    if beta == 0:
        size = n if n is not None else len(apply_adjoint(b))
        x = np.zeros(size)
        for _ in range(max_iters):
            rec(x, 0.0)
        return rec.history(x, info={"stop": "zero data", "iterations": max_iters})
    u /= beta
    v = apply_adjoint(u)
    alpha = np.linalg.norm(v)
    x = np.zeros_like(v)
    if alpha == 0:
        rec(x, beta)
        return rec.history(x, info={"stop": "A^T b = 0", "iterations": 1})
    v /= alpha
    w = v.copy()
    phibar, rhobar = beta, alpha
    stop = "max_iters"
    k = 0
    for k in range(1, max_iters + 1):
        u = apply(v) - alpha * u
        beta = np.linalg.norm(u)
        if beta > 0:
            u /= beta
        v_new = apply_adjoint(u) - beta * v
        alpha_new = np.linalg.norm(v_new)

        rho = np.hypot(rhobar, beta)
        c, s = rhobar / rho, beta / rho
        theta = s * alpha_new
        rhobar = -c * alpha_new
        phi = c * phibar
        phibar = s * phibar
        x = x + (phi / rho) * w
        rec(x, phibar)
        if beta == 0 or alpha_new == 0:
            stop = "breakdown"
            break
        v = v_new / alpha_new
        alpha = alpha_new
        w = v - (theta / rho) * w
    return rec.history(x, info={"stop": stop, "iterations": k})


@dataclass
class CGInfo:
    iterations: int
    residual_norms: list
    converged: bool


def cg_spd(apply_spd, rhs, max_iters=100, tol=1e-8, x0=None, callback=None, check_symmetry=False):
    """Conjugate gradients for a symmetric positive (semi-)definite operator.

    Stops when ``||r_k|| <= tol * ||rhs||`` or after ``max_iters`` steps.
    ``callback(x)`` is invoked after every iteration.

    Returns
    -------
    x : ndarray
    info : CGInfo
    """
    rhs = np.asarray(rhs, dtype=float)
    if check_symmetry:
        rng = np.random.default_rng(0)
        p, q = rng.standard_normal((2,) + rhs.shape)
        lhs, rhs_ = np.dot(apply_spd(p), q), np.dot(p, apply_spd(q))
        if abs(lhs - rhs_) > 1e-10 * max(abs(lhs), abs(rhs_), 1.0):
            raise ValueError("operator passed to cg_spd is not symmetric")
    x = np.zeros_like(rhs) if x0 is None else np.array(x0, dtype=float)
    r = rhs - apply_spd(x) if x0 is not None else rhs.copy()
    bnorm = np.linalg.norm(rhs)
    rr = np.dot(r, r)
    hist = [np.sqrt(rr)]
    if bnorm == 0 or np.sqrt(rr) <= tol * bnorm:
        return x, CGInfo(0, hist, True)
    p = r.copy()
    for k in range(1, max_iters + 1):
        q = apply_spd(p)
        pq = np.dot(p, q)
        if pq <= 0:
            # exhausted the range of a semi-definite operator
            return x, CGInfo(k - 1, hist, np.sqrt(rr) <= tol * bnorm)
        a = rr / pq
        x = x + a * p
        r = r - a * q
        rr_new = np.dot(r, r)
        hist.append(np.sqrt(rr_new))
        if callback is not None:
            callback(x)
        if np.sqrt(rr_new) <= tol * bnorm:
            return x, CGInfo(k, hist, True)
        p = r + (rr_new / rr) * p
        rr = rr_new
    return x, CGInfo(max_iters, hist, False)
