import numpy as np
import scipy.linalg

from ..model import MEMORY_BUDGET, BudgetError, ForwardModel


def pinv_solve_gram(G, rhs, rcond=1e-12):
    """Minimum-norm solution of ``G f = rhs`` for a symmetric PSD Gram matrix."""
    lam, V = np.linalg.eigh(G)
    keep = lam > rcond * lam.max()
    coef = (V[:, keep].T @ rhs) / lam[keep]
    return V[:, keep] @ coef


def solve_ls_direct(A, b, budget=MEMORY_BUDGET):
    """Least-squares minimizer of ``||A f - b||``, minimum-norm if rank deficient.

    ``A`` is a dense array or a :class:`ForwardModel`.  A model is assembled
    when the dense matrix fits ``budget`` and solved with a complete
    orthogonal factorization; larger models fall back to the normal equations,
    built blockwise, which needs only ``n**2 x n**2`` memory.
    """
    b = np.asarray(b, dtype=float)
    if isinstance(A, ForwardModel):
        m, n = A.shape
        if 8 * m * n <= budget:
            A = A.assemble(budget=budget)
        elif 8 * n * n <= budget:
            G, Atb = A.gram(b)
            return pinv_solve_gram(G, Atb)
        else:
            raise BudgetError("problem too large for a direct solve; use lsqr()")
    A = np.asarray(A, dtype=float)
    f, *_ = scipy.linalg.lstsq(A, b, lapack_driver="gelsy")
    return f
