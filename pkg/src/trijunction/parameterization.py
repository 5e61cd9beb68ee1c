"""Graph parameterization of a curve network over a straight reference fork.

A stationary network consists of three straight segments from a common
junction p_* to perpendicular contacts with the boundary.  Nearby networks
are written per branch as

    Phi^i(sigma) = Psi^i(sigma, rho^i(sigma), mu^i),
    Psi^i(sigma, q, mu) = Phi_*^i(xi^i(sigma, q, mu)) + q N_*^i,
    xi^i(sigma, q, mu)  = mu + (sigma / l^i) (mu_b^i(q) - mu),

where rho^i is the normal offset profile on the fixed grid [0, l^i], mu^i a
tangential junction offset, and mu_b^i(q) the abscissa at which the offset
reference line re-crosses the boundary.  Because the reference segments are
straight (extended to full lines), every partial of Psi is an exact closed
form once mu_b and its two q-derivatives are known; those come from implicit
differentiation of psi(Phi_* + q N_*) = 0, never from finite differences.

All evaluators are vectorized over sigma/q arrays and over batches of branch
indices; the evolution stepper leans on that heavily.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .domains import ImplicitDomain
from .errors import DegenerateMetric, MatrixMNotInvertible, OffsetMissesBoundary
from .tensions import JunctionMatrix, SurfaceTensions, young_angles, junction_matrix

_J_FLOOR = 1e-8
_DET_M_FLOOR = 0.5


@dataclass
class StationaryNetwork:
    """Reference configuration: junction, frames, lengths, wall curvatures."""

    p_star: np.ndarray
    tangents: np.ndarray  # (3, 2), pointing from the junction to the wall
    normals: np.ndarray  # (3, 2), N = R T
    lengths: np.ndarray  # (3,)
    h_star: np.ndarray  # (3,) boundary curvature at the three contacts
    endpoints: np.ndarray  # (3, 2)

    def sigma_grid(self, n: int) -> np.ndarray:
        """(3, n+1) array of per-branch uniform grid nodes on [0, l^i]."""
        return np.linspace(0.0, 1.0, n + 1)[None, :] * self.lengths[:, None]


@dataclass
class GraphState:
    """Evolving unknowns: nodal offsets rho^i(sigma_j), slaved mu, time."""

    rho: np.ndarray  # (3, n+1)
    mu: np.ndarray  # (3,)
    t: float = 0.0

    @property
    def n(self) -> int:
        return self.rho.shape[1] - 1

    def copy(self) -> "GraphState":
        return GraphState(self.rho.copy(), self.mu.copy(), self.t)


def network_residuals(network: StationaryNetwork, domain: ImplicitDomain,
                      tensions: SurfaceTensions) -> dict:
    """Invariant residuals of a reference network (all should be tiny)."""
    from .tensions import force_balance_residual

    g = domain.grad(network.endpoints)
    gn = g / np.linalg.norm(g, axis=1, keepdims=True)
    angles = young_angles(tensions)
    cos_pair = np.array(
        [
            float(network.tangents[i] @ network.tangents[j])
            for i, j in ((1, 2), (2, 0), (0, 1))
        ]
    )
    return {
        "force_balance": force_balance_residual(network.tangents, tensions),
        "on_boundary": float(np.max(np.abs(domain.psi(network.endpoints)))),
        "perpendicular": float(np.max(np.abs(np.einsum("ik,ik->i", network.normals, gn)))),
        "angles": float(np.max(np.abs(cos_pair - angles.cos))),
    }


# ---------------------------------------------------------------------------
# stretched coordinates


def _mu_terms(network, domain, branch, q, s_guess=None):
    """(mu_b, mu_b', mu_b'') of the offset exit abscissa, vectorized.

    branch may be an int or an integer array aligned with q.  Derivatives
    follow from differentiating psi(p_* + mu_b T + q N) = 0 twice:
        mu_b'  = -(grad psi, N) / (grad psi, T)
        mu_b'' = -(x' . D2psi . x') / (grad psi, T),  x' = mu_b' T + N.

    s_guess warm-starts the root search (time steppers pass the previous
    exits); the reference lengths are the cold start.
    """
    q = np.asarray(q, dtype=float)
    b = np.asarray(branch, dtype=int)
    T = network.tangents[b]
    N = network.normals[b]
    s_ref = network.lengths[b] if s_guess is None else np.asarray(s_guess, dtype=float)
    origin = network.p_star + q[..., None] * N
    mu_b = np.asarray(domain.line_exit(origin, T, s_ref), dtype=float)
    pts = origin + mu_b[..., None] * T
    _, grad, hess = domain.psi_grad_hess(pts)
    gT = grad[..., 0] * T[..., 0] + grad[..., 1] * T[..., 1]
    if np.any(np.abs(gT) < 1e-10):
        raise OffsetMissesBoundary("offset line tangent to the boundary")
    gN = grad[..., 0] * N[..., 0] + grad[..., 1] * N[..., 1]
    dmu = -gN / gT
    x0 = dmu * T[..., 0] + N[..., 0]
    x1 = dmu * T[..., 1] + N[..., 1]
    quad = (
        hess[..., 0, 0] * x0 * x0
        + 2.0 * hess[..., 0, 1] * x0 * x1
        + hess[..., 1, 1] * x1 * x1
    )
    return mu_b, dmu, -quad / gT


def mu_boundary(network, domain, i: int, q: float) -> float:
    """Exit abscissa mu_b^i(q) of the reference line offset by q.

    mu_b^i(0) = l^i exactly, (mu_b^i)'(0) = 0 by perpendicularity, and
    (mu_b^i)''(0) = h_*^i, so the branch length responds quadratically to
    lateral sliding with the wall curvature as coefficient.
    """
    mu_b, _, _ = _mu_terms(network, domain, i, np.asarray(q, dtype=float))
    return float(mu_b) if np.ndim(q) == 0 else mu_b


@dataclass
class PsiJet:
    """Psi and every partial needed by the flow, each of shape (..., 2)."""

    psi: np.ndarray
    d_sigma: np.ndarray
    d_q: np.ndarray
    d_mu: np.ndarray
    d_sigma_sigma: np.ndarray
    d_sigma_q: np.ndarray
    d_sigma_mu: np.ndarray
    d_qq: np.ndarray


def psi_jet(network, domain, branch, sigma, q, mu) -> PsiJet:
    """Closed-form jet of the stretched map at (sigma, q, mu), batched."""
    sigma = np.asarray(sigma, dtype=float)
    q = np.asarray(q, dtype=float)
    mu_arr = np.asarray(mu, dtype=float)
    b = np.asarray(branch, dtype=int)
    T = network.tangents[b]
    N = network.normals[b]
    l = network.lengths[b]
    mu_b, dmu, ddmu = _mu_terms(network, domain, b, q)

    frac = sigma / l
    xi = mu_arr + frac * (mu_b - mu_arr)
    xi_sigma = (mu_b - mu_arr) / l
    xi_q = frac * dmu
    xi_mu = 1.0 - frac
    xi_sigma_q = dmu / l
    xi_sigma_mu = -1.0 / l
    xi_qq = frac * ddmu

    def along(scal):
        return np.asarray(scal)[..., None] * T

    zero = np.zeros(np.broadcast_shapes(sigma.shape, q.shape, np.shape(l)) + (2,))
    return PsiJet(
        psi=network.p_star + along(xi) + q[..., None] * N,
        d_sigma=along(xi_sigma),
        d_q=along(xi_q) + N,
        d_mu=along(xi_mu),
        d_sigma_sigma=zero,
        d_sigma_q=along(xi_sigma_q),
        d_sigma_mu=along(np.broadcast_to(xi_sigma_mu, xi.shape)),
        d_qq=along(xi_qq),
    )


def psi_map(network, domain, i: int, sigma, q, mu) -> np.ndarray:
    """Point Psi^i(sigma, q, mu)."""
    return psi_jet(network, domain, i, sigma, q, mu).psi


def psi_first_jet(network, domain, branch, sigma, q, mu, s_guess=None):
    """(psi, d_sigma, d_q) only; cheap path for boundary-condition sweeps.

    Skips the curvature of the exit abscissa (no Hessian evaluation), which
    first-order boundary residuals never need.
    """
    sigma = np.asarray(sigma, dtype=float)
    q = np.asarray(q, dtype=float)
    mu_arr = np.asarray(mu, dtype=float)
    b = np.asarray(branch, dtype=int)
    T = network.tangents[b]
    N = network.normals[b]
    l = network.lengths[b]

    origin = network.p_star + q[..., None] * N
    start = l if s_guess is None else s_guess
    mu_b = np.asarray(domain.line_exit(origin, T, start), dtype=float)
    pts = origin + mu_b[..., None] * T
    grad = domain.grad(pts)
    gT = grad[..., 0] * T[..., 0] + grad[..., 1] * T[..., 1]
    if np.any(np.abs(gT) < 1e-10):
        raise OffsetMissesBoundary("offset line tangent to the boundary")
    gN = grad[..., 0] * N[..., 0] + grad[..., 1] * N[..., 1]
    dmu = -gN / gT

    frac = sigma / l
    xi = mu_arr + frac * (mu_b - mu_arr)
    xi_sigma = (mu_b - mu_arr) / l
    xi_q = frac * dmu
    psi = network.p_star + xi[..., None] * T + q[..., None] * N
    d_sigma = xi_sigma[..., None] * T
    d_q = xi_q[..., None] * T + N
    return psi, d_sigma, d_q


def _cross(a, b):
    """Scalar cross product; (X, R Y) = _cross(Y, X) for the pi/2 rotation R."""
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


# ---------------------------------------------------------------------------
# finite differences on the rho grid (second order, one-sided at the ends)


def rho_derivatives(rho: np.ndarray, lengths: np.ndarray):
    """(rho_sigma, rho_sigmasigma) on the uniform per-branch grids."""
    rho = np.asarray(rho, dtype=float)
    n = rho.shape[-1] - 1
    d = (np.asarray(lengths, dtype=float) / n)[..., None]

    rs = np.empty_like(rho)
    rs[..., 1:-1] = (rho[..., 2:] - rho[..., :-2]) / (2.0 * d)
    rs[..., 0] = (-3.0 * rho[..., 0] + 4.0 * rho[..., 1] - rho[..., 2]) / (2.0 * d[..., 0])
    rs[..., -1] = (3.0 * rho[..., -1] - 4.0 * rho[..., -2] + rho[..., -3]) / (2.0 * d[..., 0])

    rss = np.empty_like(rho)
    rss[..., 1:-1] = (rho[..., 2:] - 2.0 * rho[..., 1:-1] + rho[..., :-2]) / d**2
    rss[..., 0] = (
        2.0 * rho[..., 0] - 5.0 * rho[..., 1] + 4.0 * rho[..., 2] - rho[..., 3]
    ) / d[..., 0] ** 2
    rss[..., -1] = (
        2.0 * rho[..., -1] - 5.0 * rho[..., -2] + 4.0 * rho[..., -3] - rho[..., -4]
    ) / d[..., 0] ** 2
    return rs, rss


# ---------------------------------------------------------------------------
# metric, curvature, curve reconstruction


def metric_J(network, domain, i, rho, rho_sigma, mu, sigma):
    """|Phi_sigma|; equals 1 on the reference and sqrt(1 + rho_sigma^2) over
    a flat wall, where the chart degenerates to Cartesian graph coordinates."""
    jet = psi_jet(network, domain, i, sigma, rho, mu)
    phi_sigma = jet.d_sigma + np.asarray(rho_sigma)[..., None] * jet.d_q
    J = np.linalg.norm(phi_sigma, axis=-1)
    if np.any(J < _J_FLOOR):
        raise DegenerateMetric(f"metric J collapsed to {J.min()}")
    return float(J) if J.ndim == 0 else J


def _kappa_from_jet(jet: PsiJet, rho_sigma, rho_ss):
    """Curvature of sigma -> Psi(sigma, rho(sigma), mu) from chain-rule terms."""
    rs = np.asarray(rho_sigma)
    q_Rs = _cross(jet.d_sigma, jet.d_q)  # (Psi_q, R Psi_sigma)
    sq_Rs = _cross(jet.d_sigma, jet.d_sigma_q)
    ss_Rq = _cross(jet.d_q, jet.d_sigma_sigma)
    qq_Rs = _cross(jet.d_sigma, jet.d_qq)
    sq_Rq = _cross(jet.d_q, jet.d_sigma_q)
    qq_Rq = _cross(jet.d_q, jet.d_qq)
    ss_Rs = _cross(jet.d_sigma, jet.d_sigma_sigma)

    phi_sigma = jet.d_sigma + rs[..., None] * jet.d_q
    J = np.linalg.norm(phi_sigma, axis=-1)
    if np.any(J < _J_FLOOR):
        raise DegenerateMetric(f"metric J collapsed to {J.min()}")
    numer = (
        q_Rs * np.asarray(rho_ss)
        + (2.0 * sq_Rs + ss_Rq) * rs
        + (qq_Rs + 2.0 * sq_Rq + qq_Rq * rs) * rs**2
        + ss_Rs
    )
    return numer / J**3, J, q_Rs


def curvature_kappa(network, domain, i, rho, rho_sigma, rho_sigmasigma, mu, sigma):
    """Signed curvature of the graph curve, normal N = R Phi_sigma / J."""
    jet = psi_jet(network, domain, i, sigma, rho, mu)
    kappa, _, _ = _kappa_from_jet(jet, rho_sigma, rho_sigmasigma)
    return float(kappa) if kappa.ndim == 0 else kappa


def curve_from_graph(network, domain, state: GraphState) -> np.ndarray:
    """Sampled curves Phi^i(sigma_j), shape (3, n+1, 2)."""
    sigma = network.sigma_grid(state.n)
    branch = np.repeat(np.arange(3)[:, None], state.n + 1, axis=1)
    jet = psi_jet(network, domain, branch, sigma, state.rho,
                  state.mu[:, None] * np.ones_like(sigma))
    return jet.psi


# ---------------------------------------------------------------------------
# PDE coefficients and boundary operators


@dataclass
class Coefficients:
    """Per-node flow coefficients plus the junction coupling blocks."""

    L: np.ndarray  # (3, n+1)
    Lam: np.ndarray  # (3, n+1)
    a: np.ndarray  # (3, n+1)
    kappa: np.ndarray  # (3, n+1)
    J: np.ndarray  # (3, n+1)
    M: np.ndarray  # (3, 3) junction matrix Id - diag(Lam(0)) Q
    a1: np.ndarray  # (3, 3) nonlocal coupling Q (T0 M)^-1 diag(a(0))
    mu_t: np.ndarray  # (3,) tangential junction velocity
    det_M: float
    mu_b: np.ndarray = field(repr=False, default=None)  # exit abscissae
    rho_sigma: np.ndarray = field(repr=False, default=None)
    rho_ss: np.ndarray = field(repr=False, default=None)


def coefficients(network, domain, tensions: SurfaceTensions, state: GraphState,
                 q_matrix: JunctionMatrix | None = None,
                 det_floor: float = _DET_M_FLOOR,
                 mu_b_guess: np.ndarray | None = None) -> Coefficients:
    """Evaluate L, Lambda, a, kappa, the junction matrix M and coupling a1.

    The tangential velocities mu_t = Q (T0 M)^{-1} T0(L kappa) are returned
    as well, so one call provides the entire right-hand side
    rho_t = L kappa + Lambda mu_t of the flow.

    Because the reference fork is straight, every jet component lies in the
    branch frame (T, N); the curvature and coefficient inner products then
    collapse to scalar expressions in the xi partials, which is what this
    hot path evaluates.  curvature_kappa/metric_J keep the general vector
    route and agree with these values to rounding.
    """
    if q_matrix is None:
        q_matrix = junction_matrix(young_angles(tensions))
    Q = q_matrix.q
    g = tensions.array
    beta = tensions.beta

    n = state.n
    sigma = network.sigma_grid(n)
    rho_s, rho_ss = rho_derivatives(state.rho, network.lengths)
    l = network.lengths[:, None]
    mu = state.mu[:, None]

    branch = np.repeat(np.arange(3)[:, None], n + 1, axis=1)
    mu_b, dmu, ddmu = _mu_terms(network, domain, branch, state.rho,
                                s_guess=mu_b_guess)
    frac = sigma / l
    xi_sigma = (mu_b - mu) / l
    xi_q = frac * dmu
    xi_mu = 1.0 - frac
    xi_sq = dmu / l
    xi_qq = frac * ddmu

    J2 = (xi_sigma + xi_q * rho_s) ** 2 + rho_s**2
    if np.any(J2 < _J_FLOOR**2):
        raise DegenerateMetric(f"metric J collapsed to {np.sqrt(J2.min())}")
    J = np.sqrt(J2)
    kappa = (xi_sigma * rho_ss - (2.0 * xi_sq + xi_qq * rho_s) * rho_s**2) / (J2 * J)

    L = (g / beta)[:, None] / xi_sigma * J
    Lam = xi_mu * rho_s / xi_sigma
    a = (g / beta)[:, None] / J2

    M = np.eye(3) - Lam[:, 0, None] * Q
    det_M = float(np.linalg.det(M))
    if det_M <= det_floor:
        raise MatrixMNotInvertible(f"det M = {det_M:.4f} at or below floor {det_floor}")
    M_inv = np.linalg.inv(M)
    a1 = Q @ (M_inv * a[None, :, 0])
    mu_t = Q @ (M_inv @ (L[:, 0] * kappa[:, 0]))

    return Coefficients(L=L, Lam=Lam, a=a, kappa=kappa, J=J, M=M, a1=a1,
                        mu_t=mu_t, det_M=det_M, mu_b=mu_b,
                        rho_sigma=rho_s, rho_ss=rho_ss)


def junction_residuals_from_jets(jets, rho_sigma0, angles_cos):
    """(g12, g13) from the three sigma=0 jets and slopes there.

    g12 = (Phi^1_sigma, Phi^2_sigma) - J^1 J^2 cos(theta^3) and cyclically
    g13 with cos(theta^2): the curves meet at the Young angles iff both
    vanish.  Expanded in the Psi partials this is the standard four-term
    bilinear form in (rho^1_sigma, rho^2_sigma).
    """
    def phi_sigma(k):
        return jets[k].d_sigma + rho_sigma0[k] * jets[k].d_q

    def J(k):
        return np.linalg.norm(phi_sigma(k), axis=-1)

    g12 = phi_sigma(0) @ phi_sigma(1) - J(0) * J(1) * angles_cos[2]
    g13 = phi_sigma(2) @ phi_sigma(0) - J(2) * J(0) * angles_cos[1]
    return float(g12), float(g13)


def junction_angle_residuals(network, domain, tensions, state: GraphState):
    """Nonlinear angle residuals (g12, g13) at the junction."""
    angles = young_angles(tensions)
    rho_s, _ = rho_derivatives(state.rho, network.lengths)
    jets = [
        psi_jet(network, domain, i, 0.0, state.rho[i, 0], state.mu[i])
        for i in range(3)
    ]
    return junction_residuals_from_jets(jets, rho_s[:, 0], angles.cos)


def outer_residual_from_jet(jet, grad_at_point, rho_sigma_l):
    """Perpendicularity defect -(R Phi_sigma, grad psi)/(J |grad psi|).

    Zero iff the curve meets the wall at a right angle; about the reference
    it linearizes to rho_sigma + h_* rho at sigma = l.
    """
    phi_sigma = jet.d_sigma + np.asarray(rho_sigma_l)[..., None] * jet.d_q
    J = np.linalg.norm(phi_sigma, axis=-1)
    gnorm = np.linalg.norm(grad_at_point, axis=-1)
    return -_cross(phi_sigma, grad_at_point) / (J * gnorm)


def outer_bc_residual(network, domain, state: GraphState, i: int) -> float:
    """Outer boundary-condition residual of branch i at sigma = l^i."""
    rho_s, _ = rho_derivatives(state.rho, network.lengths)
    jet = psi_jet(network, domain, i, network.lengths[i], state.rho[i, -1], state.mu[i])
    return float(outer_residual_from_jet(jet, domain.grad(jet.psi), rho_s[i, -1]))


def state_from_rho(network, tensions, rho, t: float = 0.0,
                   q_matrix: JunctionMatrix | None = None,
                   project: bool = True) -> GraphState:
    """Bundle nodal values into a GraphState with mu slaved to rho(0).

    With project=True the junction triple is first projected onto the
    constraint plane sum_i gamma^i rho^i(0) = 0.
    """
    rho = np.array(rho, dtype=float)
    g = tensions.array
    if project:
        rho[:, 0] -= g * (g @ rho[:, 0]) / (g @ g)
    if q_matrix is None:
        q_matrix = junction_matrix(young_angles(tensions))
    return GraphState(rho=rho, mu=q_matrix.q @ rho[:, 0], t=t)
