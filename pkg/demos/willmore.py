"""Surfaces in the conformal 3-sphere and the Willmore energy.

Run with ``python demos/willmore.py``.  The conformal Willmore density is
integrated over the Clifford torus, a Moebius image of it and a torus of
revolution, and compared with closed forms.  The Clifford torus is also
used to show the Gauss image area identity and the dual surface.
"""

import numpy as np

from movingframes import builtins
from movingframes import conformal_surfaces as cs
from movingframes.groups import Geometry, random_group_element

clifford = builtins.surface("clifford_torus")
rep = cs.willmore_density_and_energy(clifford, (64, 64))
print("Clifford torus on a 64 x 64 grid")
print(f"  W                = {rep.energy:.10f}")
print(f"  2 pi^2           = {2 * np.pi**2:.10f}")
print(f"  Gauss image area = {rep.gauss_area:.10f}")
print(f"  umbilic samples  = {int(rep.umbilic.sum())}")

g = random_group_element(Geometry.MOEBIUS3, seed=8)
moved = cs.moebius_image_surface(clifford, g)
w = cs.willmore_density_and_energy(moved, (64, 64), gauss_area=False).energy
print(f"  W after a Moebius motion = {w:.10f}")

sc = cs.shape_coefficients(clifford, 0.4, 1.1)
print(f"  shape coefficients a, b, c = {float(sc.a):.6f}, {float(sc.b):.2e}, {float(sc.c):.6f}")

f3 = cs.adapted_frame_f3(clifford, 0.4, 1.1)
print(f"  dual point {np.array2string(f3.dual_point, precision=6)}")
print(f"  antipode   {np.array2string(-clifford.points(0.4, 1.1), precision=6)}")

print("\nTori of revolution: W = pi^2 x^2 / sqrt(x^2 - 1) with x = R / r")
for R, r in ((2.0, 1.0), (3.0, 1.0), (1.5, 1.0)):
    S = builtins.surface(f"torus_of_revolution({R!r}, {r!r})")
    w = cs.willmore_density_and_energy(S, (64, 64), gauss_area=False).energy
    print(f"  R/r = {R / r:.4f}  W = {w:.8f}  closed form {builtins.torus_willmore(R, r):.8f}")

print("\nThe round sphere is totally umbilic")
rep = cs.willmore_density_and_energy(builtins.surface("round_sphere"), (32, 32))
print(f"  W = {rep.energy:.1e}, umbilic samples {int(rep.umbilic.sum())} of {rep.umbilic.size}")
