#!/usr/bin/env python3
"""Linear stability: closed-form criterion versus discretized eigenproblem.

The linearization about a stationary fork is branch-wise rho_t = rho_ss with
a weighted value constraint and equal slopes at the junction, and the Robin
relation rho_s + h rho = 0 at the wall.  Its maximal eigenvalue is negative
exactly when either all wall curvatures are positive, or at most one is
non-positive and

  gamma1 (1+l1 h1) h2 h3 + gamma2 (1+l2 h2) h1 h3 + gamma3 (1+l3 h3) h1 h2 > 0.

This script evaluates both routes on instructive configurations and shows
the famous borderline: the unit disk fork has h = -1 on all branches and is
a saddle of total length (moving the junction toward the wall shortens the
network: 0.9 + 2 * 1.04624 = 2.99249 < 3), hence unstable.
"""

import numpy as np

from trijunction import (
    CircleDomain,
    SteadyGuess,
    SurfaceTensions,
    find_stationary,
    max_eigenvalue,
    stability_criterion,
)
from trijunction.parameterization import StationaryNetwork
from trijunction.tensions import tangent_frames, young_angles

print(__doc__)
tensions = SurfaceTensions((1.0, 1.0, 1.0))
T, N = tangent_frames(young_angles(tensions), 0.0)


def fork(lengths, h):
    return StationaryNetwork(np.zeros(2), T, N, np.asarray(lengths, float),
                             np.asarray(h, float), None)


cases = [
    ("all dents (h = +1)", (1.0, 1.0, 1.0), (1.0, 1.0, 1.0)),
    ("one convex wall", (1.0, 1.0, 1.0), (-0.5, 1.0, 1.0)),
    ("flat walls", (1.0, 1.0, 1.0), (0.0, 0.0, 0.0)),
    ("one flat wall", (1.0, 1.0, 1.0), (0.0, 1.0, 1.0)),
]
for name, l, h in cases:
    net = fork(l, h)
    verdict = stability_criterion(l, h, tensions)
    spec = max_eigenvalue(net, tensions, 300)
    extra = "" if verdict.criterion_value is None else f", expr = {verdict.criterion_value:+.3f}"
    print(f"{name:22s} h = {h}:  lambda_max = {spec.lambda_max:+.6f}, "
          f"{verdict.verdict}{extra}")

print()
print("--- the unit disk fork ---")
disk = CircleDomain(1.0)
net = find_stationary(disk, tensions, SteadyGuess(p=(0.02, 0.01), gauge=0.0))
verdict = stability_criterion(net.lengths, net.h_star, tensions)
spec = max_eigenvalue(net, tensions, 400)
print(f"h = {net.h_star} -> {verdict.verdict} [{verdict.case}]")
print(f"lambda_max = {spec.lambda_max:+.6f}  "
      f"(w tanh w = 1 gives w^2 = {1.1996786402577338**2:.6f})")
print("length of the fork with junction moved to (0.1, 0), rays kept straight:")
p = np.array([0.1, 0.0])
total = 0.0
for d in T:
    b = p @ d
    total += -b + np.sqrt(b * b + 1.0 - p @ p)
print(f"  {total:.6f} < 3: translations shorten the network, so the two")
print("  translation modes are unstable and the eigenvalue above is theirs.")
