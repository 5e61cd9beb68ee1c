#!/usr/bin/env python3
"""Implicit domains and their stationary forks.

A stationary network consists of straight rays from a junction, leaving at
the Young angles and crossing the wall at right angles.  The solver treats
(junction, rotation) as Newton unknowns; rotationally symmetric domains need
the rotation pinned by a gauge.

The wall curvature h reported for each contact uses the orientation in
which h equals the second derivative of the branch-length response mu_b(q)
(the branch length after sliding the contact sideways by q).  Convex walls
give h < 0 (sliding shortens the branch: destabilizing); dents give h > 0.
"""

import numpy as np

from trijunction import (
    CircleDomain,
    EllipseDomain,
    PolynomialDomain,
    SteadyGuess,
    SurfaceTensions,
    find_stationary,
    mu_boundary,
    network_residuals,
)
from trijunction.errors import SingularJacobian

print(__doc__)
tensions = SurfaceTensions((1.0, 1.0, 1.0))

print("--- unit disk ---")
disk = CircleDomain(1.0)
try:
    find_stationary(disk, tensions, SteadyGuess(p=(0.05, 0.03)))
except SingularJacobian as exc:
    print(f"without a gauge: {type(exc).__name__}: {exc}")
net = find_stationary(disk, tensions, SteadyGuess(p=(0.05, 0.03), gauge=0.0))
print(f"with gauge 0: p = {net.p_star}, l = {net.lengths}, h = {net.h_star}")
q = 0.1
print(f"branch-length response: mu_b({q}) = {mu_boundary(net, disk, 0, q):.10f}"
      f"  (chord: sqrt(1 - q^2) = {np.sqrt(1 - q*q):.10f})")
fd2 = (mu_boundary(net, disk, 0, 1e-3) + mu_boundary(net, disk, 0, -1e-3) - 2.0) / 1e-6
print(f"second difference of mu_b at 0: {fd2:.6f}  -> h = {net.h_star[0]}")

print("\n--- ellipse, semi-axes 1.2 and 1.0 ---")
ell = EllipseDomain(1.2, 1.0)
net = find_stationary(ell, tensions, SteadyGuess(p=(0.1, 0.0), gauge=0.0))
print(f"p = {net.p_star}")
print(f"l = {net.lengths}")
print(f"h = {net.h_star}")
print(f"invariants: {network_residuals(net, ell, tensions)}")

print("\n--- dented 'trefoil' polynomial domain ---")
depth, confine = 0.8, 0.2
trefoil = PolynomialDomain(
    [(2, 0, 1.0), (0, 2, 1.0), (0, 0, -1.0),
     (3, 0, depth), (1, 2, -3.0 * depth),
     (4, 0, confine), (2, 2, 2.0 * confine), (0, 4, confine)],
    bounding_box=(-2.2, 2.2, -2.2, 2.2),
)
net = find_stationary(trefoil, tensions, SteadyGuess(p=(0.02, 0.01), gauge=0.0))
print(f"p = {net.p_star}, l = {net.lengths[0]:.5f} (symmetric)")
print(f"h = {net.h_star[0]:+.5f} on every branch: dents curve away from the")
print("domain, sliding a contact sideways lengthens the branch -> stabilizing.")
