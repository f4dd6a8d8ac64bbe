import numpy as np

from .history import Recorder


def soft_threshold(z, level):
    return np.sign(z) * np.maximum(np.abs(z) - level, 0.0)


def _lipschitz_guess(apply, apply_adjoint, n, seed=0):
    # one power-iteration step on A^T A, gradient of ||Af-b||^2 is 2 A^T(Af-b)
    x = np.random.default_rng(seed).standard_normal(n)
    x /= np.linalg.norm(x)
    y = apply_adjoint(apply(x))
    return max(2.0 * np.linalg.norm(y), np.finfo(float).tiny)


def fista_l1(apply, apply_adjoint, b, lam, max_iters, f_true=None, keep_iterates=False,
             L0=None, eta=2.0, x0=None):
    """FISTA with backtracking for ``min ||A f - b||^2 + lam * ||f||_1``.

    There is no 1/2 on the quadratic, so the gradient is ``2 A^T (A f - b)``
    and the proximal step with step size ``1/L`` soft-thresholds at ``lam/L``.
    Each iteration first tries ``L / eta`` and multiplies by ``eta`` until the
    quadratic upper bound holds.
    """
    if lam < 0:
        raise ValueError("lam must be non-negative")
    b = np.asarray(b, dtype=float)
    rec = Recorder(b, f_true, keep_iterates)
    x = np.zeros_like(apply_adjoint(b)) if x0 is None else np.array(x0, dtype=float)
    L = _lipschitz_guess(apply, apply_adjoint, x.size) if L0 is None else float(L0)

    y, t = x.copy(), 1.0
    Ay = apply(y)
    objective, backtracks = [], 0
    for k in range(1, max_iters + 1):
        ry = Ay - b
        grad = 2.0 * apply_adjoint(ry)
        L = L / eta
        while True:
            p = soft_threshold(y - grad / L, lam / L)
            d = p - y
            # the smooth part is quadratic, so the upper bound
            # g(p) <= g(y) + <grad, d> + L/2 |d|^2 reduces to |A d|^2 <= L/2 |d|^2,
            # which stays meaningful when d is at roundoff level
            Ad = apply(d)
            dd = np.dot(d, d)
            if dd == 0 or np.dot(Ad, Ad) <= 0.5 * L * dd * (1 + 1e-12):
                break
            L *= eta
            backtracks += 1
        Ap = Ay + Ad
        rp = Ap - b
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        mom = (t - 1.0) / t_next
        y = p + mom * (p - x)
        # a fresh product each step; recombining A y from earlier products
        # drifts and the drift is amplified by the momentum
        Ay = apply(y)
        x, t = p, t_next
        rnorm = np.linalg.norm(rp)
        objective.append(rnorm ** 2 + lam * np.abs(x).sum())
        rec(x, rnorm)
    return rec.history(x, objective=np.array(objective),
                       info={"lipschitz": L, "backtracks": backtracks, "iterations": max_iters})
