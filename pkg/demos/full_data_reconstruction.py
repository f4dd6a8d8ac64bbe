"""
Full-data reconstruction: least squares against 100 LSQR steps
==============================================================

With all 51x51 detectors active the problem is well conditioned, so the
plain least-squares solution is already a good image.  The direct solve
goes through the normal equations built blockwise (the dense ``A`` would
need about 2 GB).
"""
import numpy as np

from cosmotomo import ForwardModel, NoiseSpec, PhantomSpec, add_noise, make_grid, make_phantom, relative_error
from cosmotomo.io import write_pgm
from cosmotomo.solvers import lsqr, solve_ls_direct

grid = make_grid(51)
model = ForwardModel.build(grid, "full")

for kind, count in (("dots", 20), ("lines", 6)):
    ftrue = make_phantom(PhantomSpec(kind, count, (-3.0, 3.0, -3.0, 3.0), 1.0, 0), grid)
    b, e = add_noise(model.apply(ftrue), NoiseSpec(0.02, 1))

    hist = lsqr(model.apply, model.adjoint, b, 100, f_true=ftrue)
    f_ls = solve_ls_direct(model, b)
    print(f"{kind}: LSQR(100) error {hist.error_norms[-1]:.4f}, LS error {relative_error(f_ls, ftrue):.4f}")

    write_pgm(f"full_{kind}_true.pgm", ftrue, grid.n)
    write_pgm(f"full_{kind}_lsqr.pgm", hist.final, grid.n)
    write_pgm(f"full_{kind}_ls.pgm", f_ls, grid.n)
