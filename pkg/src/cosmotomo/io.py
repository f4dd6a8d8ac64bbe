"""Plain-text persistence: CSV grids and vectors, PGM previews, sparse triples."""
import numpy as np
import scipy.sparse as sp

FMT = "%.17g"


def _fmt(x):
    return FMT % x


def write_image_csv(path, values, n):
    """``n`` rows (y) by ``n`` columns (x), 17 significant digits."""
    grid = np.asarray(values, dtype=float).reshape(n, n)
    with open(path, "w") as fh:
        for row in grid:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def read_image_csv(path):
    grid = np.loadtxt(path, delimiter=",", ndmin=2)
    if grid.shape[0] != grid.shape[1]:
        raise ValueError(f"{path}: image CSV is not square ({grid.shape})")
    return grid.ravel()


def write_mask_csv(path, mask, n):
    grid = np.asarray(mask, dtype=bool).reshape(n, n)
    with open(path, "w") as fh:
        for row in grid:
            fh.write(",".join("1" if v else "0" for v in row) + "\n")


def read_mask_csv(path):
    return np.loadtxt(path, delimiter=",", ndmin=2).astype(bool).ravel()


def write_vector_csv(path, values, name="value"):
    with open(path, "w") as fh:
        fh.write(name + "\n")
        for v in np.asarray(values, dtype=float):
            fh.write(_fmt(v) + "\n")


def read_vector_csv(path):
    return np.loadtxt(path, skiprows=1, ndmin=1)


def write_pgm(path, values, n):
    """8-bit ASCII PGM (P2) with linear min-max scaling; a flat image maps to 0."""
    grid = np.asarray(values, dtype=float).reshape(n, n)
    lo, hi = grid.min(), grid.max()
    if hi > lo:
        pix = np.rint(255 * (grid - lo) / (hi - lo)).astype(int)
    else:
        pix = np.zeros(grid.shape, dtype=int)
    with open(path, "w") as fh:
        fh.write(f"P2\n{n} {n}\n255\n")
        # image row 0 is y = -extent; PGM row 0 is the top, so flip
        for row in pix[::-1]:
            fh.write(" ".join(str(v) for v in row) + "\n")


def write_sparse_triples(path, matrix):
    """Header ``m n_cols nnz`` followed by 0-based ``row col value`` lines."""
    coo = sp.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w") as fh:
        fh.write(f"{coo.shape[0]} {coo.shape[1]} {coo.nnz}\n")
        for r, c, v in zip(coo.row[order], coo.col[order], coo.data[order]):
            fh.write(f"{r} {c} {_fmt(v)}\n")


def read_sparse_triples(path):
    with open(path) as fh:
        m, ncols, nnz = (int(t) for t in fh.readline().split())
        data = np.loadtxt(fh, ndmin=2) if nnz else np.zeros((0, 3))
    if len(data) != nnz:
        raise ValueError(f"{path}: header announces {nnz} entries, found {len(data)}")
    return sp.csr_matrix(
        (data[:, 2], (data[:, 0].astype(np.int64), data[:, 1].astype(np.int64))),
        shape=(m, ncols),
    )


def write_history_csv(path, history, footer=None):
    """Columns ``iter,res_rel,err_rel``; ``err_rel`` is blank without a reference.

    ``footer`` is a mapping written as trailing ``# key = value`` lines.
    """
    err = history.error_norms
    with open(path, "w") as fh:
        fh.write("iter,res_rel,err_rel\n")
        for k, res in enumerate(history.residual_norms):
            e = "" if err is None else _fmt(err[k])
            fh.write(f"{k + 1},{_fmt(res)},{e}\n")
        for key, val in (footer or {}).items():
            fh.write(f"# {key} = {_fmt(val) if isinstance(val, float) else val}\n")


def read_history_csv(path):
    """Return ``(iters, res_rel, err_rel_or_None, footer_dict)``."""
    rows, footer = [], {}
    with open(path) as fh:
        fh.readline()
        for line in fh:
            if line.startswith("#"):
                key, _, val = line[1:].partition("=")
                footer[key.strip()] = val.strip()
            elif line.strip():
                rows.append(line.rstrip("\n").split(","))
    iters = np.array([int(r[0]) for r in rows])
    res = np.array([float(r[1]) for r in rows])
    err = None if not rows or rows[0][2] == "" else np.array([float(r[2]) for r in rows])
    return iters, res, err, footer


def write_spectrum_csv(path, spectrum):
    with open(path, "w") as fh:
        fh.write("i,sigma\n")
        for i, s in enumerate(spectrum.singular_values, start=1):
            fh.write(f"{i},{_fmt(s)}\n")


def write_picard_csv(path, picard):
    with open(path, "w") as fh:
        fh.write("i,sigma,coef,solcoef\n")
        for i, (s, c, q) in enumerate(zip(picard.sigma, picard.coef, picard.solcoef), start=1):
            fh.write(f"{i},{_fmt(s)},{_fmt(c)},{_fmt(q)}\n")
