"""Implicit planar domains Omega = {psi < 0} and boundary geometry.

The domain is described by a C^3 level-set function psi with nonvanishing
gradient on {psi = 0}, so the gradient points out of Omega.  Three analytic
families are built in: circles, axis-aligned ellipses, and polynomial level
sets sum c * x^i y^j (which covers half-planes, dented circles, Cassini-type
shapes, ...).  Derivatives are exact in all cases; no finite differencing
happens inside curvature or Newton kernels.
"""

from __future__ import annotations

import numpy as np

from .errors import NoIntersection, NotOnBoundary, OffsetMissesBoundary, SingularGradient
from .tensions import ROT90

_GRAD_FLOOR = 1e-8


class ImplicitDomain:
    """Base class; subclasses provide psi, grad, hess over (..., 2) points."""

    family = "abstract"
    bounding_box = (-4.0, 4.0, -4.0, 4.0)

    def psi(self, x):
        raise NotImplementedError

    def grad(self, x):
        raise NotImplementedError

    def hess(self, x):
        raise NotImplementedError

    def contains(self, x) -> bool:
        return bool(self.psi(np.asarray(x, dtype=float)) < 0.0)

    def psi_and_grad(self, x):
        return self.psi(x), self.grad(x)

    def psi_grad_hess(self, x):
        return self.psi(x), self.grad(x), self.hess(x)

    # Roots of psi along a line, used by the stretched-coordinate map.  The
    # generic implementation is a damped Newton iteration on xi (vectorized
    # over many offsets at once) with a bisection fallback; conic subclasses
    # override it with the closed-form quadratic root.
    def line_exit(self, origin, direction, s_ref):
        origin = np.asarray(origin, dtype=float)
        direction = np.asarray(direction, dtype=float)
        s0 = np.asarray(s_ref, dtype=float)
        shape = np.broadcast_shapes(s0.shape, origin.shape[:-1], direction.shape[:-1])
        scalar = shape == ()
        if scalar:
            shape = (1,)
        s = np.broadcast_to(s0, shape).astype(float).copy()
        origin = np.broadcast_to(origin, shape + (2,))
        direction = np.broadcast_to(direction, shape + (2,))

        converged = np.zeros(s.shape, dtype=bool)
        for _ in range(60):
            pts = origin + s[..., None] * direction
            f, g = self.psi_and_grad(pts)
            converged = np.abs(f) < 1e-13
            if converged.all():
                break
            df = g[..., 0] * direction[..., 0] + g[..., 1] * direction[..., 1]
            bad = np.abs(df) < _GRAD_FLOOR
            df = np.where(bad, 1.0, df)
            step = np.where(converged | bad, 0.0, f / df)
            # keep the iteration local to the reference root
            np.clip(step, -0.25, 0.25, out=step)
            s = s - step
        if not converged.all():
            s_flat = s.reshape(-1)
            ok_flat = converged.reshape(-1)
            o_flat = origin.reshape(-1, 2)
            d_flat = direction.reshape(-1, 2)
            ref_flat = np.broadcast_to(s0, converged.shape).reshape(-1)
            for idx in np.nonzero(~ok_flat)[0]:
                s_flat[idx] = self._bracketed_root(
                    o_flat[idx], d_flat[idx], ref_flat[idx]
                )
            s = s_flat.reshape(s.shape)
        return float(s[0]) if scalar else s

    def _bracketed_root(self, origin, direction, s_ref):
        from scipy.optimize import brentq

        def f(t):
            return float(self.psi(origin + t * direction))

        # expand a bracket around the reference abscissa
        width = max(1e-3, 1e-3 * abs(s_ref))
        lo = hi = None
        f_ref = f(s_ref)
        for _ in range(60):
            a, b = s_ref - width, s_ref + width
            fa, fb = f(a), f(b)
            if fa == 0.0:
                return a
            if fb == 0.0:
                return b
            if np.sign(fa) != np.sign(f_ref):
                lo, hi = (a, s_ref) if a < s_ref else (s_ref, a)
                break
            if np.sign(fb) != np.sign(f_ref):
                lo, hi = (s_ref, b) if b > s_ref else (b, s_ref)
                break
            width *= 2.0
            if width > 4.0 * _box_diameter(self.bounding_box):
                break
        if lo is None:
            raise OffsetMissesBoundary(
                f"no boundary crossing near s = {s_ref} along offset line"
            )
        root = brentq(f, lo, hi, xtol=1e-15, rtol=8.9e-16)
        # Newton polish so |psi| < 1e-13 rather than |dt| small
        for _ in range(3):
            val = f(root)
            if abs(val) < 1e-13:
                break
            slope = float(np.dot(self.grad(origin + root * direction), direction))
            if abs(slope) < _GRAD_FLOOR:
                break
            root -= val / slope
        return root


class CircleDomain(ImplicitDomain):
    """psi = |x - center|^2 - R^2."""

    family = "circle"

    def __init__(self, radius: float, center=(0.0, 0.0)):
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.radius = float(radius)
        self.center = np.asarray(center, dtype=float)
        cx, cy = self.center
        m = 1.5 * self.radius
        self.bounding_box = (cx - m, cx + m, cy - m, cy + m)

    def psi(self, x):
        d = np.asarray(x, dtype=float) - self.center
        return np.einsum("...k,...k->...", d, d) - self.radius**2

    def grad(self, x):
        return 2.0 * (np.asarray(x, dtype=float) - self.center)

    def hess(self, x):
        x = np.asarray(x, dtype=float)
        h = np.zeros(x.shape[:-1] + (2, 2))
        h[..., 0, 0] = 2.0
        h[..., 1, 1] = 2.0
        return h

    def line_exit(self, origin, direction, s_ref):
        # psi(origin + s d) is quadratic in s; take the root on the far side
        # of the chord, which is the one continuous in the reference root.
        origin = np.asarray(origin, dtype=float) - self.center
        direction = np.asarray(direction, dtype=float)
        a = np.einsum("...k,...k->...", direction, direction)
        b = np.einsum("...k,...k->...", origin, direction)
        c = np.einsum("...k,...k->...", origin, origin) - self.radius**2
        disc = b * b - a * c
        if np.any(disc <= 0.0):
            raise OffsetMissesBoundary("offset line misses the circle")
        return (-b + np.sqrt(disc)) / a


class EllipseDomain(ImplicitDomain):
    """psi = x^2/a^2 + y^2/b^2 - 1, axes aligned with the coordinates."""

    family = "ellipse"

    def __init__(self, a: float, b: float):
        if a <= 0 or b <= 0:
            raise ValueError("semi-axes must be positive")
        self.a = float(a)
        self.b = float(b)
        self.bounding_box = (-1.5 * a, 1.5 * a, -1.5 * b, 1.5 * b)
        self._w = np.array([1.0 / self.a**2, 1.0 / self.b**2])

    def psi(self, x):
        x = np.asarray(x, dtype=float)
        return np.einsum("...k,k,...k->...", x, self._w, x) - 1.0

    def grad(self, x):
        return 2.0 * self._w * np.asarray(x, dtype=float)

    def hess(self, x):
        x = np.asarray(x, dtype=float)
        h = np.zeros(x.shape[:-1] + (2, 2))
        h[..., 0, 0] = 2.0 * self._w[0]
        h[..., 1, 1] = 2.0 * self._w[1]
        return h

    def line_exit(self, origin, direction, s_ref):
        origin = np.asarray(origin, dtype=float)
        direction = np.asarray(direction, dtype=float)
        a = np.einsum("...k,k,...k->...", direction, self._w, direction)
        b = np.einsum("...k,k,...k->...", origin, self._w, direction)
        c = np.einsum("...k,k,...k->...", origin, self._w, origin) - 1.0
        disc = b * b - a * c
        if np.any(disc <= 0.0):
            raise OffsetMissesBoundary("offset line misses the ellipse")
        return (-b + np.sqrt(disc)) / a


class PolynomialDomain(ImplicitDomain):
    """psi = sum_m c_m x^{i_m} y^{j_m} with exact coefficient differentiation."""

    family = "polynomial"

    def __init__(self, terms, bounding_box=(-4.0, 4.0, -4.0, 4.0)):
        terms = [(int(i), int(j), float(c)) for i, j, c in terms]
        if not terms:
            raise ValueError("polynomial domain needs at least one term")
        self.terms = terms
        self.bounding_box = tuple(float(v) for v in bounding_box)
        self._sets = {
            "psi": _pack(terms),
            "px": _pack(_dx(terms)),
            "py": _pack(_dy(terms)),
            "pxx": _pack(_dx(_dx(terms))),
            "pxy": _pack(_dy(_dx(terms))),
            "pyy": _pack(_dy(_dy(terms))),
        }
        # dense coefficient matrices over a shared monomial table; one pair
        # of power ladders then serves psi and all derivatives at once
        self._deg_x = max(i for i, _, _ in terms)
        self._deg_y = max(j for _, j, _ in terms)
        self._mats = {
            key: _coef_matrix(self._sets[key], self._deg_x, self._deg_y)
            for key in self._sets
        }
        order = ("psi", "px", "py", "pxx", "pxy", "pyy")
        self._stack_all = np.stack([self._mats[k] for k in order])
        self._stack_pg = self._stack_all[:3]

    def _ladders(self, x):
        x = np.asarray(x, dtype=float)
        xs = np.empty(x.shape[:-1] + (self._deg_x + 1,))
        ys = np.empty(x.shape[:-1] + (self._deg_y + 1,))
        xs[..., 0] = 1.0
        ys[..., 0] = 1.0
        for k in range(self._deg_x):
            xs[..., k + 1] = xs[..., k] * x[..., 0]
        for k in range(self._deg_y):
            ys[..., k + 1] = ys[..., k] * x[..., 1]
        return xs, ys

    def _eval_mat(self, key, xs, ys):
        return np.einsum("...i,ij,...j->...", xs, self._mats[key], ys)

    def _eval(self, key, x):
        xs, ys = self._ladders(x)
        return self._eval_mat(key, xs, ys)

    def psi(self, x):
        return self._eval("psi", x)

    def grad(self, x):
        xs, ys = self._ladders(x)
        return np.stack(
            [self._eval_mat("px", xs, ys), self._eval_mat("py", xs, ys)], axis=-1
        )

    def hess(self, x):
        xs, ys = self._ladders(np.asarray(x, dtype=float))
        h = np.empty(xs.shape[:-1] + (2, 2))
        h[..., 0, 0] = self._eval_mat("pxx", xs, ys)
        h[..., 0, 1] = h[..., 1, 0] = self._eval_mat("pxy", xs, ys)
        h[..., 1, 1] = self._eval_mat("pyy", xs, ys)
        return h

    def _eval_stack(self, stack, x):
        """Evaluate several coefficient matrices in one pass: (..., k)."""
        xs, ys = self._ladders(np.asarray(x, dtype=float))
        return np.einsum("...i,kij,...j->...k", xs, stack, ys)

    def psi_and_grad(self, x):
        vals = self._eval_stack(self._stack_pg, x)
        return vals[..., 0], vals[..., 1:3]

    def psi_grad_hess(self, x):
        """Fused evaluation; one power-ladder pass for all six fields."""
        vals = self._eval_stack(self._stack_all, x)
        h = np.empty(vals.shape[:-1] + (2, 2))
        h[..., 0, 0] = vals[..., 3]
        h[..., 0, 1] = h[..., 1, 0] = vals[..., 4]
        h[..., 1, 1] = vals[..., 5]
        return vals[..., 0], vals[..., 1:3], h


def _pack(terms):
    if not terms:
        return np.zeros(0, dtype=int), np.zeros(0, dtype=int), np.zeros(0)
    i, j, c = zip(*terms)
    return np.asarray(i, dtype=float), np.asarray(j, dtype=float), np.asarray(c)


def _coef_matrix(packed, deg_x, deg_y):
    powx, powy, coef = packed
    mat = np.zeros((deg_x + 1, deg_y + 1))
    for i, j, c in zip(powx.astype(int), powy.astype(int), coef):
        mat[i, j] += c
    return mat


def _dx(terms):
    return [(i - 1, j, c * i) for i, j, c in terms if i > 0]


def _dy(terms):
    return [(i, j - 1, c * j) for i, j, c in terms if j > 0]


def _box_diameter(box):
    return float(np.hypot(box[1] - box[0], box[3] - box[2]))


def poly_product(*term_lists):
    """Multiply polynomial term lists [(i, j, c), ...], merging like monomials.

    Convenient for composite level sets such as a disk with excluded disks:
    psi = -(R^2 - |x|^2) * prod_k (|x - c_k|^2 - r_k^2).
    """
    acc = {(0, 0): 1.0}
    for terms in term_lists:
        out = {}
        for (i1, j1), c1 in acc.items():
            for i2, j2, c2 in terms:
                key = (i1 + int(i2), j1 + int(j2))
                out[key] = out.get(key, 0.0) + c1 * float(c2)
        acc = out
    return [(i, j, c) for (i, j), c in sorted(acc.items()) if c != 0.0]


def poly_scale(terms, factor):
    return [(i, j, factor * c) for i, j, c in terms]


def disk_terms(radius, center=(0.0, 0.0)):
    """Terms of |x - center|^2 - radius^2."""
    cx, cy = center
    return [
        (2, 0, 1.0),
        (0, 2, 1.0),
        (1, 0, -2.0 * cx),
        (0, 1, -2.0 * cy),
        (0, 0, cx**2 + cy**2 - radius**2),
    ]


def make_domain(kind: str, **params) -> ImplicitDomain:
    """Factory used by the config layer."""
    if kind == "circle":
        return CircleDomain(params["radius"], params.get("center", (0.0, 0.0)))
    if kind == "ellipse":
        a, b = params["semi_axes"]
        return EllipseDomain(a, b)
    if kind == "polynomial":
        kwargs = {}
        if "bounding_box" in params and params["bounding_box"] is not None:
            kwargs["bounding_box"] = params["bounding_box"]
        return PolynomialDomain(params["coefficients"], **kwargs)
    raise ValueError(f"unknown domain type {kind!r}")


def boundary_tangent(domain: ImplicitDomain, x) -> np.ndarray:
    """Unit tangent of the boundary, the outward gradient rotated by pi/2."""
    g = domain.grad(np.asarray(x, dtype=float))
    norm = np.linalg.norm(g, axis=-1, keepdims=True)
    if np.any(norm < _GRAD_FLOOR):
        raise SingularGradient("gradient vanishes on the boundary")
    return (g / norm) @ ROT90.T


def boundary_curvature(domain: ImplicitDomain, x, tol: float = 1e-8):
    """Boundary curvature h = -(D^2 psi t, t)/|grad psi| at a boundary point.

    t is the unit boundary tangent.  With Omega = {psi < 0} the sign is
    negative wherever the wall bulges away from the interior (any convex
    domain, e.g. h = -1/R on a circle of radius R) and positive inside dents.
    This orientation matches the second derivative of the branch-length
    function mu(q): sliding an endpoint sideways along a positively curved
    (dented) wall lengthens the branch, which is the stabilizing case.
    """
    x = np.asarray(x, dtype=float)
    val = np.asarray(domain.psi(x))
    scale = max(1.0, _box_diameter(domain.bounding_box))
    if np.any(np.abs(val) > tol * scale):
        raise NotOnBoundary(f"psi(x) = {val} exceeds boundary tolerance")
    g = domain.grad(x)
    gnorm = np.linalg.norm(g, axis=-1)
    if np.any(gnorm < _GRAD_FLOOR):
        raise SingularGradient("gradient vanishes on the boundary")
    t = boundary_tangent(domain, x)
    quad = np.einsum("...i,...ij,...j->...", t, domain.hess(x), t)
    h = -quad / gnorm
    return float(h) if h.ndim == 0 else h


def boundary_hit(domain: ImplicitDomain, origin, direction):
    """First boundary crossing of the ray origin + t*direction, t > 0.

    Returns (point, distance) with |psi(point)| < 1e-12.  Marches through the
    bounding box to bracket the first sign change, then bisects (brentq) and
    polishes with Newton.
    """
    origin = np.asarray(origin, dtype=float)
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    if domain.psi(origin) >= 0.0:
        raise NoIntersection("ray origin must lie inside the domain")

    t_max = _box_diameter(domain.bounding_box)
    n_scan = 512
    ts = np.linspace(0.0, t_max, n_scan + 1)
    vals = domain.psi(origin + ts[:, None] * direction)
    pos = np.nonzero(vals > 0.0)[0]
    if pos.size == 0:
        raise NoIntersection("ray does not exit the domain inside the bounding box")
    k = pos[0]
    from scipy.optimize import brentq

    def f(t):
        return float(domain.psi(origin + t * direction))

    t = brentq(f, ts[k - 1], ts[k], xtol=1e-15, rtol=8.9e-16)
    for _ in range(4):
        val = f(t)
        if abs(val) < 1e-12:
            break
        slope = float(np.dot(domain.grad(origin + t * direction), direction))
        if abs(slope) < _GRAD_FLOOR:
            break
        t -= val / slope
    point = origin + t * direction
    if abs(f(t)) > 1e-12:
        raise NoIntersection("root polish failed to reach |psi| < 1e-12")
    return point, float(t)
