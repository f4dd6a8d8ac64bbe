"""
The forward model: waves, rays and their composition
=====================================================

Builds the 51x51 mesh on [-7, 7]^2 with 40 slices in [0, 2], pushes a
single spike through the leapfrog scheme, traces the null rays and checks
that the composed operator ``A = H S`` and its adjoint agree.
"""
import numpy as np

from cosmotomo import DetectorMask, ForwardModel, WavePropagator, make_grid

grid = make_grid(51, extent=7.0, t_final=2.0, n_slices=40)
print(f"dx = {grid.dx:.4f}, dt = {grid.dt:.4f}, courant = {grid.courant:.5f}")

# one leapfrog step spreads a spike to its four neighbours
prop = WavePropagator(grid)
spike = np.zeros(grid.size)
spike[grid.flat_index(25, 25)] = 1.0
step = grid.to_image(prop.apply(spike))
print("T applied to a centre spike:\n", np.round(step[24:27, 24:27], 6))

# the full space-time field S f, one stored slice per row block
field = prop.forward(spike).reshape(grid.n_slices, grid.n, grid.n)
radius = [int(np.max(np.abs(np.argwhere(np.abs(s) > 1e-3) - 25))) for s in field[::8]]
print("support radius (cells) every 8 slices:", radius)

# rays: every node is a source, every active node on the t = 2 plane a receiver
for label in ("full", "21x21", "7x7", "3x3"):
    model = ForwardModel.build(grid, label)
    print(f"{label:>6} detectors: m = {model.shape[0]:>7}")

# the composed model and its adjoint
model = ForwardModel.build(grid, "7x7")
rng = np.random.default_rng(0)
f = rng.standard_normal(grid.size)
b = rng.standard_normal(model.shape[0])
Af = model.apply(f)
gap = abs(Af @ b - f @ model.adjoint(b)) / (np.linalg.norm(Af) * np.linalg.norm(b))
print(f"adjoint test on the 7x7 model: relative gap {gap:.1e}")
