import numpy as np
import pytest

from trijunction.domains import (
    CircleDomain,
    EllipseDomain,
    PolynomialDomain,
    boundary_curvature,
    boundary_hit,
    disk_terms,
    make_domain,
    poly_product,
)
from trijunction.errors import NoIntersection, NotOnBoundary, SingularGradient

from oracles import ellipse_curvature_magnitude


def fd_check(domain, pts, eps=1e-4):
    """Max relative error of grad/hess against centered differences of psi."""
    ex, ey = np.array([eps, 0.0]), np.array([0.0, eps])
    gx = (domain.psi(pts + ex) - domain.psi(pts - ex)) / (2 * eps)
    gy = (domain.psi(pts + ey) - domain.psi(pts - ey)) / (2 * eps)
    grad = domain.grad(pts)
    scale = np.abs(grad).max() + 1.0
    err_g = max(np.abs(gx - grad[..., 0]).max(), np.abs(gy - grad[..., 1]).max())
    hxx = (domain.psi(pts + ex) - 2 * domain.psi(pts) + domain.psi(pts - ex)) / eps**2
    hyy = (domain.psi(pts + ey) - 2 * domain.psi(pts) + domain.psi(pts - ey)) / eps**2
    hxy = (
        domain.psi(pts + ex + ey)
        - domain.psi(pts + ex - ey)
        - domain.psi(pts - ex + ey)
        + domain.psi(pts - ex - ey)
    ) / (4 * eps**2)
    hess = domain.hess(pts)
    err_h = max(
        np.abs(hxx - hess[..., 0, 0]).max(),
        np.abs(hyy - hess[..., 1, 1]).max(),
        np.abs(hxy - hess[..., 0, 1]).max(),
    )
    return max(err_g, err_h) / scale


@pytest.mark.parametrize(
    "domain",
    [
        CircleDomain(1.0),
        CircleDomain(2.0, center=(0.3, -0.2)),
        EllipseDomain(1.2, 1.0),
        PolynomialDomain(
            [(2, 0, 1.0), (0, 2, 1.0), (0, 0, -1.0), (3, 0, 0.5), (1, 2, -1.5),
             (4, 0, 0.2), (2, 2, 0.4), (0, 4, 0.2)]
        ),
    ],
)
def test_derivatives_match_finite_differences(domain):
    rng = np.random.default_rng(3)
    pts = rng.uniform(-0.7, 0.7, size=(40, 2))
    assert fd_check(domain, pts) < 1e-6


def test_unit_disk_curvature_is_minus_one():
    d = CircleDomain(1.0)
    for ang in np.linspace(0, 2 * np.pi, 17):
        x = np.array([np.cos(ang), np.sin(ang)])
        assert abs(boundary_curvature(d, x) + 1.0) < 1e-12


def test_disk_radius_two_curvature():
    d = CircleDomain(2.0)
    vals = [
        boundary_curvature(d, 2.0 * np.array([np.cos(a), np.sin(a)]))
        for a in np.linspace(0, 2 * np.pi, 23)
    ]
    vals = np.array(vals)
    assert np.all(np.abs(vals + 0.5) < 1e-10)
    assert vals.max() - vals.min() < 1e-10


def test_half_plane_curvature_is_zero():
    hp = PolynomialDomain([(0, 1, 1.0)])  # psi = y, domain is the lower half-plane
    assert abs(boundary_curvature(hp, (0.0, 0.0))) < 1e-14
    assert abs(boundary_curvature(hp, (2.0, 0.0))) < 1e-14


def test_ellipse_curvature_matches_parametric_oracle():
    a, b = 1.7, 0.9
    d = EllipseDomain(a, b)
    for t in np.linspace(0.0, 2 * np.pi, 50, endpoint=False):
        x = np.array([a * np.cos(t), b * np.sin(t)])
        h = boundary_curvature(d, x)
        assert h < 0.0  # convex wall
        assert abs(abs(h) - ellipse_curvature_magnitude(a, b, t)) < 1e-8


def test_boundary_curvature_rejects_off_boundary_points():
    d = CircleDomain(1.0)
    with pytest.raises(NotOnBoundary):
        boundary_curvature(d, (0.5, 0.0))


def test_singular_gradient_detected():
    # (|x|^2 - 1)^2 vanishes to second order on the circle
    squared = PolynomialDomain(poly_product(disk_terms(1.0), disk_terms(1.0)))
    with pytest.raises(SingularGradient):
        boundary_curvature(squared, (1.0, 0.0))


@pytest.mark.parametrize(
    "origin,direction,point,dist",
    [
        ((0.0, 0.0), (1.0, 0.0), (1.0, 0.0), 1.0),
        ((0.5, 0.0), (1.0, 0.0), (1.0, 0.0), 0.5),
    ],
)
def test_boundary_hit_unit_circle(origin, direction, point, dist):
    d = CircleDomain(1.0)
    pt, t = boundary_hit(d, origin, direction)
    assert np.allclose(pt, point, atol=1e-12)
    assert abs(t - dist) < 1e-12


def test_boundary_hit_ellipse_axis():
    d = EllipseDomain(2.0, 1.0)
    pt, t = boundary_hit(d, (0.0, 0.0), (0.0, 1.0))
    assert np.allclose(pt, (0.0, 1.0), atol=1e-12)
    assert abs(t - 1.0) < 1e-12


def test_boundary_hit_requires_interior_origin():
    with pytest.raises(NoIntersection):
        boundary_hit(CircleDomain(1.0), (2.0, 0.0), (1.0, 0.0))


@pytest.mark.parametrize(
    "domain",
    [CircleDomain(1.3), EllipseDomain(1.4, 0.8),
     PolynomialDomain([(2, 0, 1.0), (0, 2, 1.0), (0, 0, -1.0), (3, 0, 0.4), (1, 2, -1.2),
                       (4, 0, 0.2), (2, 2, 0.4), (0, 4, 0.2)],
                      bounding_box=(-2.2, 2.2, -2.2, 2.2))],
)
def test_boundary_hit_random_rays(domain):
    rng = np.random.default_rng(11)
    hits = 0
    while hits < 100:
        origin = rng.uniform(-0.5, 0.5, 2)
        if not domain.contains(origin):
            continue
        ang = rng.uniform(0, 2 * np.pi)
        pt, t = boundary_hit(domain, origin, (np.cos(ang), np.sin(ang)))
        assert abs(float(domain.psi(pt))) < 1e-12
        x0, x1, y0, y1 = domain.bounding_box
        assert x0 <= pt[0] <= x1 and y0 <= pt[1] <= y1
        assert t > 0
        hits += 1


def test_conic_line_exit_matches_generic_newton():
    # the closed-form quadratic roots must agree with the generic root finder
    circle = CircleDomain(1.1, center=(0.1, -0.05))
    generic = PolynomialDomain(disk_terms(1.1, (0.1, -0.05)))
    rng = np.random.default_rng(4)
    for _ in range(25):
        origin = rng.uniform(-0.3, 0.3, 2)
        ang = rng.uniform(0, 2 * np.pi)
        direction = np.array([np.cos(ang), np.sin(ang)])
        _, t_ref = boundary_hit(circle, origin, direction)
        s1 = circle.line_exit(origin, direction, t_ref * 1.05)
        s2 = generic.line_exit(origin, direction, t_ref * 1.05)
        assert abs(s1 - t_ref) < 1e-10
        assert abs(s2 - t_ref) < 1e-10


def test_make_domain_factory():
    assert make_domain("circle", radius=2.0).family == "circle"
    assert make_domain("ellipse", semi_axes=(1.2, 1.0)).family == "ellipse"
    assert make_domain("polynomial", coefficients=[(0, 1, 1.0)]).family == "polynomial"
    with pytest.raises(ValueError):
        make_domain("mesh")
