"""Spacetime Dirac dynamics pulled back to spinor space.

A spinor field Psi(x, t) obeying (i gamma^mu d_mu - m) Psi = 0 is mapped
to spinor space through an invertible matrix phi that commutes with
gamma^0.  The pulled-back point psi = phi^-1 Psi(x, t) then moves with
generalized velocity

    dt_psi = -i m gamma^0 psi - gamma^0 phi^-1 (gamma . grad_x Psi)

For plane waves this velocity extends to a linear vector field on spinor
space whose divergence (over the 8 real coordinates) vanishes in the
massless case: the flow transports density like an incompressible fluid.
With a nontrivial spin structure the Dirac operator acquires the extra
term i gamma^mu (d_mu theta) for a real function theta(x, t); the flow
then picks up a -theta_dot psi drift and the density grows like
rho_0 exp(theta) at the normalized (per degree of freedom) rate.

All of this module works in float mode with numpy; natural units
(hbar = c = 1) throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import SpinorForgeError, build_gamma_basis

_FLOAT_BASIS = build_gamma_basis("float")
GAMMA = tuple(g.to_numpy() for g in _FLOAT_BASIS.gammas)
GAMMA5 = _FLOAT_BASIS.gamma5.to_numpy()
_ID4 = np.eye(4, dtype=complex)

DEFAULT_SPACETIME_STEP = 1e-5
DEFAULT_DIVERGENCE_STEP = 1e-4


class OffShell(SpinorForgeError):
    """Momentum does not satisfy p.p = m^2."""


class MassiveInput(SpinorForgeError):
    """The incompressibility check only asserts anything for m = 0."""


class StepTooLarge(SpinorForgeError):
    """The integrator's step-halving error estimate exceeded its budget."""


def minkowski(p, q) -> float:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    return float(p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3])


# ---------------------------------------------------------------------------
# Fields
# ---------------------------------------------------------------------------


@dataclass
class SpinorField:
    """Evaluator (x, t) -> 4-component complex value, with optional analytic
    derivatives.  When the analytic evaluators are missing, derivatives fall
    back to central differences with step `h`."""

    value: Callable[[np.ndarray, float], np.ndarray]
    dt: Callable[[np.ndarray, float], np.ndarray] | None = None
    dx: Callable[[np.ndarray, float], np.ndarray] | None = None  # (3, 4) array
    h: float = DEFAULT_SPACETIME_STEP
    label: str = ""

    @classmethod
    def constant(cls, psi0) -> "SpinorField":
        psi0 = np.asarray(psi0, dtype=complex).reshape(4)
        zero3 = np.zeros((3, 4), dtype=complex)
        return cls(
            value=lambda x, t: psi0.copy(),
            dt=lambda x, t: np.zeros(4, dtype=complex),
            dx=lambda x, t: zero3.copy(),
            label="constant",
        )

    def time_derivative(self, x, t) -> np.ndarray:
        if self.dt is not None:
            return self.dt(x, t)
        h = self.h
        return (self.value(x, t + h) - self.value(x, t - h)) / (2 * h)

    def spatial_derivative(self, x, t) -> np.ndarray:
        if self.dx is not None:
            return self.dx(x, t)
        x = np.asarray(x, dtype=float)
        h = self.h
        out = np.empty((3, 4), dtype=complex)
        for i in range(3):
            step = np.zeros(3)
            step[i] = h
            out[i] = (self.value(x + step, t) - self.value(x - step, t)) / (2 * h)
        return out


def _massless_chiral_block(pvec: np.ndarray, energy: float, left: bool) -> np.ndarray:
    """2-spinor annihilated by E +/- p.sigma, with a deterministic phase."""
    sigma_p = np.array(
        [
            [pvec[2], pvec[0] - 1j * pvec[1]],
            [pvec[0] + 1j * pvec[1], -pvec[2]],
        ],
        dtype=complex,
    )
    mat = energy * np.eye(2) + sigma_p if left else energy * np.eye(2) - sigma_p
    _, vecs = np.linalg.eigh(mat)
    xi = vecs[:, 0]  # eigenvector of the zero eigenvalue
    k = int(np.argmax(np.abs(xi)))
    xi = xi * (np.abs(xi[k]) / xi[k])  # largest component real positive
    return xi


def _hermitian_sqrt(mat: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(mat)
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def plane_wave_spinor(p, m: float, spin: int = 0) -> np.ndarray:
    """Constant spinor u with (gamma . p - m) u = 0.

    For m > 0, u = (sqrt(p.sigma) xi, sqrt(p.sigmabar) xi) with xi the
    `spin` basis 2-spinor.  For m = 0 the solutions are chiral: spin = 0
    picks the left-handed branch (upper components), spin = 1 the
    right-handed one.
    """
    p = np.asarray(p, dtype=float).reshape(4)
    energy, pvec = p[0], p[1:]
    u = np.zeros(4, dtype=complex)
    if m == 0.0:
        if spin not in (0, 1):
            raise ValueError("massless branch selector must be 0 (left) or 1 (right)")
        xi = _massless_chiral_block(pvec, energy, left=(spin == 0))
        if spin == 0:
            u[:2] = xi
        else:
            u[2:] = xi
        return u
    if spin not in (0, 1):
        raise ValueError("spin selector must be 0 or 1")
    sigma_p = np.array(
        [
            [pvec[2], pvec[0] - 1j * pvec[1]],
            [pvec[0] + 1j * pvec[1], -pvec[2]],
        ],
        dtype=complex,
    )
    xi = np.zeros(2, dtype=complex)
    xi[spin] = 1.0
    p_sigma = energy * np.eye(2) - sigma_p
    p_sigmabar = energy * np.eye(2) + sigma_p
    u[:2] = _hermitian_sqrt(p_sigma) @ xi
    u[2:] = _hermitian_sqrt(p_sigmabar) @ xi
    return u


def plane_wave(p, m: float, spin: int = 0, tol: float = 1e-12) -> SpinorField:
    """On-shell plane-wave solution u(p) exp(-i p.x) with analytic derivatives."""
    p = np.asarray(p, dtype=float).reshape(4)
    if p[0] <= 0:
        raise OffShell("plane waves need positive energy p[0]")
    shell = minkowski(p, p) - m * m
    if abs(shell) > tol * max(1.0, float(p @ p)):
        raise OffShell(f"p.p - m^2 = {shell}")
    u = plane_wave_spinor(p, m, spin)

    def phase(x, t):
        x = np.asarray(x, dtype=float)
        return np.exp(-1j * (p[0] * t - p[1:] @ x))

    def value(x, t):
        return u * phase(x, t)

    def dt(x, t):
        return -1j * p[0] * u * phase(x, t)

    def dx(x, t):
        ph = phase(x, t)
        return np.array([1j * p[i + 1] * u * ph for i in range(3)])

    return SpinorField(value=value, dt=dt, dx=dx, label=f"plane_wave(p={p.tolist()}, m={m})")


def dirac_apply(field: SpinorField, m: float, x, t) -> np.ndarray:
    """(i gamma^mu d_mu - m) Psi at a spacetime point."""
    x = np.asarray(x, dtype=float)
    out = 1j * (GAMMA[0] @ field.time_derivative(x, t))
    dxs = field.spatial_derivative(x, t)
    for i in range(3):
        out = out + 1j * (GAMMA[i + 1] @ dxs[i])
    return out - m * field.value(x, t)


# ---------------------------------------------------------------------------
# Avatar map and pulled-back flow
# ---------------------------------------------------------------------------

CONDITION_CAP = 1e6


class AvatarMap:
    """Invertible matrix commuting with gamma^0, the bridge to spinor space.

    In the frozen Weyl basis the commutant of gamma^0 is the block family
    [[P, Q], [Q, P]]; the constructor enforces commutation (to 1e-12),
    invertibility, and a condition-number cap.
    """

    def __init__(self, matrix):
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.shape != (4, 4):
            raise ValueError("avatar map must be 4x4")
        comm = GAMMA[0] @ matrix - matrix @ GAMMA[0]
        scale = max(1.0, float(np.abs(matrix).max()))
        if np.abs(comm).max() > 1e-12 * scale:
            raise ValueError("avatar map must commute with gamma^0")
        if abs(np.linalg.det(matrix)) == 0.0:
            raise ValueError("avatar map must be invertible")
        if np.linalg.cond(matrix) > CONDITION_CAP:
            raise ValueError(f"avatar map condition number exceeds {CONDITION_CAP:g}")
        self.matrix = matrix
        self.inverse = np.linalg.inv(matrix)

    @classmethod
    def identity(cls) -> "AvatarMap":
        return cls(_ID4)

    @classmethod
    def from_blocks(cls, p_block, q_block) -> "AvatarMap":
        p_block = np.asarray(p_block, dtype=complex)
        q_block = np.asarray(q_block, dtype=complex)
        top = np.hstack([p_block, q_block])
        bottom = np.hstack([q_block, p_block])
        return cls(np.vstack([top, bottom]))

    @classmethod
    def random_commutant(cls, seed: int, cond_max: float = 100.0, tries: int = 64) -> "AvatarMap":
        """A random, well-conditioned member of the gamma^0 commutant."""
        rng = np.random.default_rng(seed)
        for _ in range(tries):
            p_block = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            q_block = 0.3 * (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
            candidate = np.vstack(
                [np.hstack([p_block, q_block]), np.hstack([q_block, p_block])]
            )
            if np.linalg.cond(candidate) <= cond_max:
                return cls(candidate)
        raise ValueError("could not draw a well-conditioned commutant member")


def pullback(field: SpinorField, phi: AvatarMap, x, t) -> np.ndarray:
    """psi = phi^-1 Psi(x, t)."""
    return phi.inverse @ field.value(np.asarray(x, dtype=float), t)


def avatar_velocity(field: SpinorField, phi: AvatarMap, m: float, x, t) -> np.ndarray:
    """dt_psi = -i m gamma^0 psi - gamma^0 phi^-1 (gamma . grad_x Psi).

    For m = 0 the first term drops and the velocity is the pure spatial
    transport term.
    """
    x = np.asarray(x, dtype=float)
    psi = pullback(field, phi, x, t)
    dxs = field.spatial_derivative(x, t)
    grad_term = np.zeros(4, dtype=complex)
    for i in range(3):
        grad_term = grad_term + GAMMA[i + 1] @ dxs[i]
    return -1j * m * (GAMMA[0] @ psi) - GAMMA[0] @ (phi.inverse @ grad_term)


@dataclass
class FlowState:
    """A spinor-space point with its generalized velocity and its context."""

    psi: np.ndarray
    dt_psi: np.ndarray
    field: SpinorField
    x: np.ndarray
    t: float


def pullback_state(field: SpinorField, phi: AvatarMap, m: float, x, t) -> FlowState:
    x = np.asarray(x, dtype=float)
    return FlowState(
        psi=pullback(field, phi, x, t),
        dt_psi=avatar_velocity(field, phi, m, x, t),
        field=field,
        x=x,
        t=t,
    )


def flow_divergence(velocity: Callable[[np.ndarray], np.ndarray], psi, h: float) -> float:
    """Central-difference divergence over the 8 real spinor coordinates."""
    if h <= 0:
        raise ValueError("h must be positive")
    psi = np.asarray(psi, dtype=complex).reshape(4)
    div = 0.0
    for comp in range(4):
        for im_dir in (False, True):
            e = np.zeros(4, dtype=complex)
            e[comp] = 1j if im_dir else 1.0
            delta = (velocity(psi + h * e) - velocity(psi - h * e)) / (2 * h)
            div += delta[comp].imag if im_dir else delta[comp].real
    return float(div)


def plane_wave_flow_matrix(p, phi: AvatarMap, m: float = 0.0) -> np.ndarray:
    """Matrix A with dt_psi = A psi for a plane-wave context.

    Spatial derivatives of u exp(-i p.x) are i p^i times the value, so the
    pulled-back velocity is linear in psi:
    A = -i m gamma^0 - i gamma^0 phi^-1 (p . gamma) phi.
    """
    p = np.asarray(p, dtype=float).reshape(4)
    p_dot_gamma = sum(p[i + 1] * GAMMA[i + 1] for i in range(3))
    return -1j * m * GAMMA[0] - 1j * (GAMMA[0] @ phi.inverse @ p_dot_gamma @ phi.matrix)


# ---------------------------------------------------------------------------
# Fixed-step 4th order integration with step-halving error control
# ---------------------------------------------------------------------------


def _rk4_step(f, t, y, dt):
    k1 = f(t, y)
    k2 = f(t + dt / 2, y + dt / 2 * k1)
    k3 = f(t + dt / 2, y + dt / 2 * k2)
    k4 = f(t + dt, y + dt * k3)
    return y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


@dataclass
class DensityState:
    """Final density with the integrated (t, psi, rho) trajectory log."""

    rho: float
    log: list = field(default_factory=list)


def _integrate_flow(velocity, psi0, rho0, t_span, dt, err_budget, divergence_h):
    """March psi and ln(rho) together; returns arrays and a DensityState.

    d psi / dt = V(t, psi); d ln rho / dt = -div V(t, .)(psi).
    Each step is re-done with two half steps, and the discrepancy feeds the
    StepTooLarge error budget.
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    if dt <= 0:
        raise ValueError("dt must be positive")
    n_steps = max(1, int(round((t1 - t0) / dt)))
    step = (t1 - t0) / n_steps

    def _div_at(t, psi):
        step = divergence_h * (1.0 + float(np.linalg.norm(psi)))
        return flow_divergence(lambda q: velocity(t, q), psi, step)

    def rhs(t, y):
        psi = y[:4]
        dpsi = velocity(t, psi)
        return np.concatenate([dpsi, [-_div_at(t, psi) + 0j]])

    y = np.concatenate([np.asarray(psi0, dtype=complex), [np.log(rho0) + 0j]])
    times = [t0]
    rhos = [float(rho0)]
    lnrhos = [float(np.log(rho0))]
    divs = [_div_at(t0, y[:4])]
    state = DensityState(rho=float(rho0), log=[(t0, y[:4].copy(), float(rho0))])

    t = t0
    for _ in range(n_steps):
        full = _rk4_step(rhs, t, y, step)
        half = _rk4_step(rhs, t + step / 2, _rk4_step(rhs, t, y, step / 2), step / 2)
        err = float(np.max(np.abs(full - half))) / max(1.0, float(np.max(np.abs(half))))
        if err > err_budget:
            raise StepTooLarge(
                f"step error estimate {err:.3e} exceeds budget {err_budget:.3e}; reduce dt"
            )
        y = half
        t += step
        rho = float(np.exp(y[4].real))
        times.append(t)
        rhos.append(rho)
        lnrhos.append(float(y[4].real))
        divs.append(_div_at(t, y[:4]))
        state.log.append((t, y[:4].copy(), rho))
    state.rho = rhos[-1]
    return np.array(times), np.array(rhos), np.array(lnrhos), np.array(divs), state


# ---------------------------------------------------------------------------
# Incompressibility (massless) and the massive reporting path
# ---------------------------------------------------------------------------


@dataclass
class LiouvilleReport:
    max_divergence: float
    mean_divergence: float
    drho_dt_over_rho: float  # implied rate -div at the worst sample
    rho_initial: float
    rho_final: float
    rho_rel_drift: float
    n_points: int
    h: float
    tolerance: float
    passed: bool
    asserted: bool = True
    mass: float = 0.0
    trajectory: tuple | None = None  # (times, rho, ln_rho, divergence) arrays

    def as_dict(self) -> dict:
        return {
            "max_divergence": self.max_divergence,
            "mean_divergence": self.mean_divergence,
            "drho_dt_over_rho": self.drho_dt_over_rho,
            "rho_initial": self.rho_initial,
            "rho_final": self.rho_final,
            "rho_rel_drift": self.rho_rel_drift,
            "n_points": self.n_points,
            "h": self.h,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "asserted": self.asserted,
            "mass": self.mass,
        }


def _divergence_stats(flow_matrix, n_points, h, seed):
    rng = np.random.default_rng(seed)
    worst = 0.0
    total = 0.0
    worst_signed = 0.0
    for _ in range(n_points):
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        step = h * (1.0 + float(np.linalg.norm(psi)))
        div = flow_divergence(lambda q: flow_matrix @ q, psi, step)
        total += abs(div)
        if abs(div) > worst:
            worst = abs(div)
            worst_signed = div
    return worst, total / n_points, -worst_signed


def liouville_check(
    p,
    phi: AvatarMap | None = None,
    n_points: int = 100,
    h: float = DEFAULT_DIVERGENCE_STEP,
    m: float = 0.0,
    seed: int = 0,
    tol: float = 1e-6,
    t_span=(0.0, 1.0),
    dt: float = 1e-3,
    rho0: float = 1.0,
    err_budget: float = 1e-7,
) -> LiouvilleReport:
    """Verify the incompressible behavior of the massless pulled-back flow.

    Samples spinor-space points on the plane-wave flow, measures the
    numerical divergence at each, and integrates rho along a trajectory;
    passes when the worst divergence stays within `tol` and rho stays
    constant.  Refuses a nonzero mass: the massive flow is computed but
    never asserted (use `massive_flow_report`).
    """
    if m != 0.0:
        raise MassiveInput(
            "incompressibility is only asserted for m = 0; "
            "use massive_flow_report for the non-asserted massive numbers"
        )
    p = np.asarray(p, dtype=float).reshape(4)
    if abs(minkowski(p, p)) > 1e-9 * max(1.0, float(p @ p)):
        raise OffShell("liouville_check needs a massless (null) momentum")
    if phi is None:
        phi = AvatarMap.identity()
    a_matrix = plane_wave_flow_matrix(p, phi, 0.0)
    worst, mean, implied = _divergence_stats(a_matrix, n_points, h, seed)

    rng = np.random.default_rng(seed + 1)
    psi0 = rng.normal(size=4) + 1j * rng.normal(size=4)
    times, rhos, lnrhos, divs, _ = _integrate_flow(
        lambda t, q: a_matrix @ q, psi0, rho0, t_span, dt, err_budget, h
    )
    drift = abs(rhos[-1] - rhos[0]) / rhos[0]
    return LiouvilleReport(
        max_divergence=worst,
        mean_divergence=mean,
        drho_dt_over_rho=implied,
        rho_initial=float(rhos[0]),
        rho_final=float(rhos[-1]),
        rho_rel_drift=float(drift),
        n_points=n_points,
        h=h,
        tolerance=tol,
        passed=bool(worst <= tol and drift <= tol),
        trajectory=(times, rhos, lnrhos, divs),
    )


def massive_flow_report(
    p,
    m: float,
    phi: AvatarMap | None = None,
    n_points: int = 100,
    h: float = DEFAULT_DIVERGENCE_STEP,
    seed: int = 0,
) -> LiouvilleReport:
    """Divergence statistics of the massive pulled-back flow, never asserted.

    The numbers are recorded for inspection only; `passed` reports nothing
    and is pinned to True with `asserted` False so callers cannot mistake
    this for a verified statement.
    """
    p = np.asarray(p, dtype=float).reshape(4)
    shell = minkowski(p, p) - m * m
    if abs(shell) > 1e-9 * max(1.0, float(p @ p)):
        raise OffShell(f"p.p - m^2 = {shell}")
    if phi is None:
        phi = AvatarMap.identity()
    a_matrix = plane_wave_flow_matrix(p, phi, m)
    worst, mean, implied = _divergence_stats(a_matrix, n_points, h, seed)
    return LiouvilleReport(
        max_divergence=worst,
        mean_divergence=mean,
        drho_dt_over_rho=implied,
        rho_initial=1.0,
        rho_final=1.0,
        rho_rel_drift=0.0,
        n_points=n_points,
        h=h,
        tolerance=float("nan"),
        passed=True,
        asserted=False,
        mass=m,
    )


# ---------------------------------------------------------------------------
# Exotic spin structure: the theta term
# ---------------------------------------------------------------------------


@dataclass
class ExoticTheta:
    """Real scalar theta(x, t) with its 4-gradient (d_t, d_x, d_y, d_z)."""

    value: Callable[[np.ndarray, float], float]
    gradient: Callable[[np.ndarray, float], np.ndarray]
    label: str = ""

    @classmethod
    def zero(cls) -> "ExoticTheta":
        return cls.linear(0.0)

    @classmethod
    def linear(cls, kappa: float, kvec=(0.0, 0.0, 0.0)) -> "ExoticTheta":
        kvec = np.asarray(kvec, dtype=float).reshape(3)
        grad = np.concatenate([[float(kappa)], kvec])

        def value(x, t):
            x = np.asarray(x, dtype=float)
            return float(kappa * t + kvec @ x)

        return cls(value=value, gradient=lambda x, t: grad.copy(), label=f"linear(kappa={kappa})")

    @classmethod
    def from_grid(cls, t_axis, x_axis, y_axis, z_axis, values) -> "ExoticTheta":
        """Tabulated theta on a regular (t, x, y, z) grid.

        Values are interpolated linearly; the gradient interpolates the
        central-difference gradient grids.
        """
        from scipy.interpolate import RegularGridInterpolator

        axes = tuple(np.asarray(a, dtype=float) for a in (t_axis, x_axis, y_axis, z_axis))
        values = np.asarray(values, dtype=float)
        if values.shape != tuple(len(a) for a in axes):
            raise ValueError("grid values must have shape (len(t), len(x), len(y), len(z))")
        interp = RegularGridInterpolator(axes, values, method="linear")
        grads = np.gradient(values, *axes, edge_order=2)
        grad_interp = [RegularGridInterpolator(axes, g, method="linear") for g in grads]

        def value(x, t):
            pt = np.concatenate([[t], np.asarray(x, dtype=float)])
            return float(interp(pt)[0])

        def gradient(x, t):
            pt = np.concatenate([[t], np.asarray(x, dtype=float)])
            return np.array([float(g(pt)[0]) for g in grad_interp])

        return cls(value=value, gradient=gradient, label="tabulated")


def theta_gradient_consistency(theta: ExoticTheta, points, h: float = 1e-4) -> float:
    """Worst deviation between theta.gradient and central differences of theta.value."""
    worst = 0.0
    for x, t in points:
        x = np.asarray(x, dtype=float)
        fd = np.empty(4)
        fd[0] = (theta.value(x, t + h) - theta.value(x, t - h)) / (2 * h)
        for i in range(3):
            step = np.zeros(3)
            step[i] = h
            fd[i + 1] = (theta.value(x + step, t) - theta.value(x - step, t)) / (2 * h)
        worst = max(worst, float(np.max(np.abs(fd - theta.gradient(x, t)))))
    return worst


def exotic_dirac_apply(field: SpinorField, m: float, theta: ExoticTheta, x, t) -> np.ndarray:
    """(D + i gamma^mu (d_mu theta)) Psi for the shifted Dirac operator."""
    x = np.asarray(x, dtype=float)
    grad = theta.gradient(x, t)
    value = field.value(x, t)
    extra = 1j * grad[0] * (GAMMA[0] @ value)
    for i in range(3):
        extra = extra + 1j * grad[i + 1] * (GAMMA[i + 1] @ value)
    return dirac_apply(field, m, x, t) + extra


def exotic_velocity(
    field: SpinorField,
    theta: ExoticTheta,
    phi: AvatarMap,
    m: float,
    x,
    t,
) -> np.ndarray:
    """Pulled-back velocity of the shifted dynamics.

    dt_psi = -i m gamma^0 psi - theta_dot psi
             - gamma^0 phi^-1 (gamma . {grad_x Psi + (grad_x theta) Psi})

    With theta identically zero this is exactly `avatar_velocity`.
    """
    x = np.asarray(x, dtype=float)
    psi = pullback(field, phi, x, t)
    grad = theta.gradient(x, t)
    value = field.value(x, t)
    dxs = field.spatial_derivative(x, t)
    grad_term = np.zeros(4, dtype=complex)
    for i in range(3):
        grad_term = grad_term + GAMMA[i + 1] @ (dxs[i] + grad[i + 1] * value)
    return (
        -1j * m * (GAMMA[0] @ psi)
        - grad[0] * psi
        - GAMMA[0] @ (phi.inverse @ grad_term)
    )


def exotic_flow_matrix(
    p,
    theta: ExoticTheta,
    phi: AvatarMap,
    m: float = 0.0,
    x=(0.0, 0.0, 0.0),
    t: float = 0.0,
    field_kind: str = "plane_wave",
) -> np.ndarray:
    """Linear matrix A(t) with dt_psi = A psi for the two analytic contexts.

    'plane_wave': Psi_tilde = exp(-theta) u exp(-i p.x), for which the
    braced spatial term collapses to i (p . gamma) Psi_tilde.
    'constant': Psi_tilde constant, so only (grad_x theta) Psi survives.
    Both add the common -theta_dot and mass terms.
    """
    x = np.asarray(x, dtype=float)
    grad = theta.gradient(x, t)
    a_matrix = (-1j * m) * GAMMA[0] - grad[0] * _ID4
    if field_kind == "plane_wave":
        p = np.asarray(p, dtype=float).reshape(4)
        spatial = sum(1j * p[i + 1] * GAMMA[i + 1] for i in range(3))
    elif field_kind == "constant":
        spatial = sum(grad[i + 1] * GAMMA[i + 1] for i in range(3))
    else:
        raise ValueError("field_kind must be 'plane_wave' or 'constant'")
    return a_matrix - GAMMA[0] @ phi.inverse @ spatial @ phi.matrix


DEGREES_OF_FREEDOM = 8  # real coordinates of a 4-component complex spinor


@dataclass
class ExoticDensityReport:
    times: np.ndarray
    rho: np.ndarray
    ln_rho: np.ndarray
    divergence: np.ndarray
    rate_normalized: np.ndarray  # -div / 8, per real degree of freedom
    rate_raw: np.ndarray  # -div
    theta_dot: np.ndarray
    max_rate_deviation: float
    rho_normalized_final: float
    expected_rho_final: float
    tolerance: float
    passed: bool
    state: DensityState

    def as_dict(self) -> dict:
        return {
            "t_final": float(self.times[-1]),
            "rho_final_raw": float(self.rho[-1]),
            "rho_normalized_final": self.rho_normalized_final,
            "expected_rho_final": self.expected_rho_final,
            "max_rate_deviation": self.max_rate_deviation,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "n_steps": int(len(self.times) - 1),
        }


def exotic_density_check(
    theta: ExoticTheta,
    rho0: float = 1.0,
    t_span=(0.0, 1.0),
    dt: float = 1e-3,
    p=(1.0, 0.0, 0.0, 1.0),
    phi: AvatarMap | None = None,
    field_kind: str = "plane_wave",
    h: float = DEFAULT_DIVERGENCE_STEP,
    tol: float = 1e-4,
    err_budget: float = 1e-7,
    seed: int = 0,
) -> ExoticDensityReport:
    """Integrate the exotic flow density and compare its growth rate to theta_dot.

    The raw divergence counts every real degree of freedom, so the raw
    ln(rho) rate is 8 * theta_dot; the normalized (per degree of freedom)
    rate is the one matching the scalar law rho = rho_0 exp(theta).  Both
    are reported.
    """
    if phi is None:
        phi = AvatarMap.identity()
    x0 = np.zeros(3)

    def velocity(t, q):
        return exotic_flow_matrix(p, theta, phi, 0.0, x0, t, field_kind) @ q

    rng = np.random.default_rng(seed)
    psi0 = rng.normal(size=4) + 1j * rng.normal(size=4)
    times, rhos, lnrhos, divs, state = _integrate_flow(
        velocity, psi0, rho0, t_span, dt, err_budget, h
    )
    theta_dots = np.array([theta.gradient(x0, t)[0] for t in times])
    rate_raw = -divs
    rate_norm = rate_raw / DEGREES_OF_FREEDOM
    scale = max(1.0, float(np.max(np.abs(theta_dots))))
    max_dev = float(np.max(np.abs(rate_norm - theta_dots))) / scale

    theta_shift = theta.value(x0, float(times[-1])) - theta.value(x0, float(times[0]))
    expected = rho0 * float(np.exp(theta_shift))
    rho_norm_final = rho0 * float(np.exp((lnrhos[-1] - lnrhos[0]) / DEGREES_OF_FREEDOM))
    return ExoticDensityReport(
        times=times,
        rho=rhos,
        ln_rho=lnrhos,
        divergence=divs,
        rate_normalized=rate_norm,
        rate_raw=rate_raw,
        theta_dot=theta_dots,
        max_rate_deviation=max_dev,
        rho_normalized_final=rho_norm_final,
        expected_rho_final=expected,
        tolerance=tol,
        passed=bool(max_dev <= tol),
        state=state,
    )


# ---------------------------------------------------------------------------
# Trajectory output
# ---------------------------------------------------------------------------


def trajectory_rows(times, rhos, lnrhos, divs):
    """Rows (t, rho, ln_rho, divergence) for CSV emission."""
    return [
        (float(t), float(r), float(lr), float(d))
        for t, r, lr, d in zip(times, rhos, lnrhos, divs)
    ]


def write_trajectory_csv(path, rows) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "rho", "ln_rho", "divergence"])
        writer.writerows(rows)


def plot_density(path, times, rhos) -> None:
    """Optional single line chart of rho versus t."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(times, rhos)
    ax.set_xlabel("t")
    ax.set_ylabel("rho")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
