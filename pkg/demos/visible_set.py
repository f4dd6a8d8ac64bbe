"""
Where can the detectors see?
============================

A pixel can only be recovered if a null ray through it reaches an active
detector.  For a centred block of detectors that region is a thickened
ring of radius ``t_final`` around the block.  Printed here as text.
"""
import numpy as np

from cosmotomo import DetectorMask, make_grid, visible_mask
from cosmotomo.io import write_mask_csv

grid = make_grid(51)
for label in ("3x3", "7x7", "21x21"):
    vm = visible_mask(grid, DetectorMask.from_label(grid, label))
    write_mask_csv(f"visible_{label}.csv", vm.mask, grid.n)
    img = grid.to_image(vm.mask)[::-1]  # top row is +y
    print(f"{label}: {vm.fraction:.1%} of the pixels are visible")
    for row in img[10:41:2]:
        print("   " + "".join("#" if v else "." for v in row[10:41]))
