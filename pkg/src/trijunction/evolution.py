"""Time integration of the junction flow on the fixed sigma grids.

One step is linearly implicit: the stiff local diffusion a^i rho_ss is
advanced implicitly (one tridiagonal solve per branch), while the nonlocal
junction coupling Lambda^i * (a1 T0 rho_ss) and all lower-order content,
i.e. the difference L kappa + Lambda mu_t - a rho_ss evaluated at the
current state, is explicit.  A Newton sweep on the six boundary nodal
values then re-enforces the junction conditions (weighted sum exactly, the
two angle residuals to tolerance) and the three perpendicularity conditions,
with interior nodes frozen; mu is slaved to rho(0) through the junction
matrix after every sweep so the stick condition cannot drift.

The explicit remainder carries second-derivative traces, so the classic
diffusive guard dt <= 0.5 dsigma^2 / max(a) is enforced even though the
principal part is implicit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .domains import ImplicitDomain
from .errors import (
    CflViolation,
    CompatibilityFailed,
    DegenerateMetric,
    MatrixMNotInvertible,
    NewtonDiverged,
    OffsetMissesBoundary,
)
from .parameterization import (
    GraphState,
    StationaryNetwork,
    coefficients,
    psi_first_jet,
    psi_jet,
    state_from_rho,
)
from .tensions import SurfaceTensions, constraint_basis, junction_matrix, young_angles

_CFL_SLACK = 1.0 + 1e-9


@dataclass
class EvolveConfig:
    dt: float
    t_end: float
    n: int = 100
    newton_tol: float = 1e-10
    newton_max: int = 20
    output_every: int = 50
    det_m_floor: float = 0.5
    amplitude_cap: float = 0.25


@dataclass
class Trajectory:
    records: list
    states: list
    status: str  # "completed" | "amplitude_cap" | a numerics-error name
    message: str = ""

    @property
    def times(self):
        return np.array([r.t for r in self.records])


class Stepper:
    """Holds per-run constants and the lagged boundary Jacobian."""

    def __init__(self, network: StationaryNetwork, domain: ImplicitDomain,
                 tensions: SurfaceTensions, config: EvolveConfig):
        self.network = network
        self.domain = domain
        self.tensions = tensions
        self.config = config
        self.angles = young_angles(tensions)
        self.qmat = junction_matrix(self.angles)
        self.basis = constraint_basis(tensions)  # (2, 3)
        self.gammas = tensions.array
        n = config.n
        self.dsigma = network.lengths / n
        self._branch6 = np.array([0, 1, 2, 0, 1, 2])
        self._sigma6 = np.concatenate([np.zeros(3), network.lengths])
        self._jac = None
        self._jac_age = 0
        self._mu_b_prev = None
        self._exit6 = None

    # -- boundary residuals ------------------------------------------------

    def _bc_residual(self, rho, r0, w):
        """Junction angle + outer perpendicularity residuals for boundary
        values (r0, w) with the interior of `rho` frozen."""
        net, dom = self.network, self.domain
        mu = self.qmat.q @ r0
        q6 = np.concatenate([r0, w])
        mu6 = np.concatenate([mu, mu])
        psi, d_sigma, d_q = psi_first_jet(net, dom, self._branch6, self._sigma6,
                                          q6, mu6, s_guess=self._exit6)

        d = self.dsigma
        rs0 = (-3.0 * r0 + 4.0 * rho[:, 1] - rho[:, 2]) / (2.0 * d)
        rsl = (3.0 * w - 4.0 * rho[:, -2] + rho[:, -3]) / (2.0 * d)
        rs6 = np.concatenate([rs0, rsl])

        phi_s = d_sigma + rs6[:, None] * d_q
        J = np.sqrt(phi_s[:, 0] ** 2 + phi_s[:, 1] ** 2)
        c = self.angles.cos
        g12 = phi_s[0] @ phi_s[1] - J[0] * J[1] * c[2]
        g13 = phi_s[2] @ phi_s[0] - J[2] * J[0] * c[1]

        grad = dom.grad(psi[3:])
        gnorm = np.sqrt(grad[:, 0] ** 2 + grad[:, 1] ** 2)
        cross = phi_s[3:, 0] * grad[:, 1] - phi_s[3:, 1] * grad[:, 0]
        outer = -cross / (J[3:] * gnorm)
        return np.array([g12, g13, outer[0], outer[1], outer[2]])

    def enforce_bcs(self, rho, tol=None, max_iter=None, exc=NewtonDiverged):
        """Newton on the 5 boundary unknowns; returns (rho, r0) updated.

        The junction triple is parameterized inside the weighted constraint
        plane, so sum_i gamma^i rho^i(0) = 0 holds exactly throughout.
        """
        cfg = self.config
        tol = cfg.newton_tol if tol is None else tol
        max_iter = cfg.newton_max if max_iter is None else max_iter
        g = self.gammas
        r0 = rho[:, 0] - g * (g @ rho[:, 0]) / (g @ g)
        w = rho[:, -1].copy()

        def unpack(u):
            return r0_base + u[0] * self.basis[0] + u[1] * self.basis[1], u[2:]

        r0_base = r0.copy()
        u = np.zeros(5)
        u[2:] = w
        F = self._bc_residual(rho, *unpack(u))
        for it in range(max_iter):
            fmax = np.max(np.abs(F))
            if fmax < tol:
                break
            if self._jac is None or it >= 2 or self._jac_age > 100:
                self._jac = self._bc_jacobian(rho, u, unpack, F)
                self._jac_age = 0
            try:
                step = np.linalg.solve(self._jac, -F)
            except np.linalg.LinAlgError as e:
                raise exc(f"boundary sweep Jacobian singular: {e}") from e
            lam, base = 1.0, np.linalg.norm(F)
            for _ in range(9):
                u_try = u + lam * step
                F_try = self._bc_residual(rho, *unpack(u_try))
                if np.linalg.norm(F_try) < base:
                    u, F = u_try, F_try
                    break
                lam *= 0.5
            else:
                # stale Jacobian made no progress; force a refresh once
                if self._jac_age == 0:
                    raise exc(f"boundary sweep stalled at residual {base:.3e}")
                self._jac = None
        else:
            raise exc(
                f"boundary sweep did not reach {tol:.1e} "
                f"(residual {np.max(np.abs(F)):.3e})"
            )
        self._jac_age += 1
        r0_new, w_new = unpack(u)
        rho[:, 0] = r0_new
        rho[:, -1] = w_new
        return rho, r0_new

    def _bc_jacobian(self, rho, u, unpack, F0):
        jac = np.empty((5, 5))
        h = 1e-7
        for k in range(5):
            up = u.copy()
            up[k] += h
            jac[:, k] = (self._bc_residual(rho, *unpack(up)) - F0) / h
        return jac

    # -- one time step -----------------------------------------------------

    def step(self, state: GraphState) -> GraphState:
        cfg = self.config
        coef = coefficients(self.network, self.domain, self.tensions, state,
                            q_matrix=self.qmat, det_floor=cfg.det_m_floor,
                            mu_b_guess=self._mu_b_prev)
        self._mu_b_prev = coef.mu_b
        self._exit6 = np.concatenate([coef.mu_b[:, 0], coef.mu_b[:, -1]])
        a = coef.a
        guard = 0.5 * float(np.min(self.dsigma**2 / a.max(axis=1)))
        if cfg.dt > guard * _CFL_SLACK:
            raise CflViolation(f"dt = {cfg.dt:.3e} exceeds guard {guard:.3e}")

        rhs = coef.L * coef.kappa + coef.Lam * coef.mu_t[:, None]
        expl = rhs - a * coef.rho_ss

        rho = state.rho
        n = state.n
        dt = cfg.dt
        d2 = self.dsigma**2

        # explicit predictor for the boundary nodes
        b0 = rho[:, 0] + dt * rhs[:, 0]
        bn = rho[:, -1] + dt * rhs[:, -1]

        # batched tridiagonal solve for the interior nodes of all branches
        r = dt * a[:, 1:-1] / d2[:, None]  # (3, n-1)
        rhs_int = rho[:, 1:-1] + dt * expl[:, 1:-1]
        rhs_int[:, 0] += r[:, 0] * b0
        rhs_int[:, -1] += r[:, -1] * bn
        m = n - 1
        ab = np.zeros((3, 3 * m))
        ab[1] = (1.0 + 2.0 * r).ravel()
        upper = -r.copy()
        upper[:, -1] = 0.0  # no coupling across branch blocks
        ab[0, 1:] = upper.ravel()[:-1]
        lower = -r.copy()
        lower[:, 0] = 0.0
        ab[2, :-1] = lower.ravel()[1:]
        sol = solve_banded((1, 1), ab, rhs_int.ravel())

        rho_new = np.empty_like(rho)
        rho_new[:, 1:-1] = sol.reshape(3, m)
        rho_new[:, 0] = b0
        rho_new[:, -1] = bn
        rho_new, r0 = self.enforce_bcs(rho_new)
        return GraphState(rho=rho_new, mu=self.qmat.q @ r0, t=state.t + dt)


def step(network, domain, tensions, state, config) -> GraphState:
    """Single step without reusing stepper state (convenience wrapper)."""
    return Stepper(network, domain, tensions, config).step(state)


def initial_state(network, domain, tensions, config: EvolveConfig,
                  kind: str = "cosine", amplitude: float = 0.01,
                  cosine_coefficients=None, eigenfunction=None) -> GraphState:
    """Compatible initial data from a perturbation recipe.

    kind="cosine": rho^i(sigma) = amplitude * sum_k c^i_k cos(k pi sigma/l_i)
    with per-branch coefficient lists (default: the first mode on every
    branch).  kind="eigenmode": amplitude * phi/||phi||_inf for a supplied
    or freshly computed eigenfunction of the linearized problem.

    The junction triple is projected exactly onto the weighted constraint
    plane and the boundary values are Newton-corrected until the nonlinear
    junction and wall conditions hold to newton_tol.
    """
    n = config.n
    sigma = network.sigma_grid(n)
    if kind == "cosine":
        if cosine_coefficients is None:
            cosine_coefficients = [[0.0, 1.0]] * 3
        rho = np.zeros((3, n + 1))
        for i in range(3):
            for k, ck in enumerate(cosine_coefficients[i]):
                rho[i] += ck * np.cos(k * np.pi * sigma[i] / network.lengths[i])
        rho *= amplitude
    elif kind == "eigenmode":
        if eigenfunction is None:
            from .stability import max_eigenvalue

            eigenfunction = max_eigenvalue(network, tensions, n).eigenfunction
        phi = np.asarray(eigenfunction, dtype=float)
        if phi.shape != (3, n + 1):
            raise ValueError(f"eigenfunction shape {phi.shape} != (3, {n + 1})")
        rho = amplitude * phi / np.max(np.abs(phi))
    else:
        raise ValueError(f"unknown perturbation kind {kind!r}")

    state = state_from_rho(network, tensions, rho, t=0.0)
    stepper = Stepper(network, domain, tensions, config)
    rho, r0 = stepper.enforce_bcs(state.rho, exc=CompatibilityFailed)
    state = GraphState(rho=rho, mu=stepper.qmat.q @ r0, t=0.0)
    # fail early if the state starts outside the admissible region
    coefficients(network, domain, tensions, state, q_matrix=stepper.qmat,
                 det_floor=config.det_m_floor)
    return state


_ABORTING = (MatrixMNotInvertible, DegenerateMetric, CflViolation,
             NewtonDiverged, OffsetMissesBoundary)


def run(network, domain, tensions, init: GraphState, config: EvolveConfig) -> Trajectory:
    """Integrate to t_end, recording diagnostics every output_every steps.

    The run never blows up silently: leaving the admissible neighbourhood
    (det M floor, metric collapse, step-size guard, failed sweep) or hitting
    the amplitude cap ends the trajectory with that status.
    """
    from .diagnostics import record_from_state

    stepper = Stepper(network, domain, tensions, config)
    state = init
    records = [record_from_state(network, domain, tensions, state)]
    states = [state.copy()]
    status, message = "completed", ""
    n_steps = int(round(config.t_end / config.dt))
    for k in range(1, n_steps + 1):
        try:
            state = stepper.step(state)
        except _ABORTING as exc:
            status, message = type(exc).__name__, str(exc)
            break
        if np.max(np.abs(state.rho)) > config.amplitude_cap:
            status = "amplitude_cap"
            message = f"max |rho| exceeded {config.amplitude_cap} at t = {state.t:.6g}"
            records.append(record_from_state(network, domain, tensions, state))
            states.append(state.copy())
            break
        if k % config.output_every == 0 or k == n_steps:
            records.append(record_from_state(network, domain, tensions, state))
            states.append(state.copy())
    return Trajectory(records=records, states=states, status=status, message=message)


def junction_kinematics(network, domain, state0: GraphState, state1: GraphState):
    """(V, v): normal/tangential junction velocities from consecutive states.

    The junction displacement rate is resolved against the current unit
    frames of each branch at sigma = 0, so v should reproduce Q V and the
    weighted tangential sum should vanish, both up to O(dt + dsigma).
    """
    dt = state1.t - state0.t
    if dt <= 0:
        raise ValueError("states must be time ordered")

    def junction_point(state):
        pts = (network.p_star
               + state.mu[:, None] * network.tangents
               + state.rho[:, 0, None] * network.normals)
        return pts.mean(axis=0)

    dp = (junction_point(state1) - junction_point(state0)) / dt
    d = network.lengths / state0.n
    rs0 = (-3.0 * state0.rho[:, 0] + 4.0 * state0.rho[:, 1] - state0.rho[:, 2]) / (2.0 * d)
    jet = psi_jet(network, domain, np.arange(3), np.zeros(3), state0.rho[:, 0], state0.mu)
    phi_s = jet.d_sigma + rs0[:, None] * jet.d_q
    J = np.linalg.norm(phi_s, axis=1)
    T = phi_s / J[:, None]
    N = np.stack([-T[:, 1], T[:, 0]], axis=1)
    V = N @ dp
    v = T @ dp
    return V, v
