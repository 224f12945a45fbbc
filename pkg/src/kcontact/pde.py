"""Method-of-lines solvers for the (t, x) field equations and their oracles.

Spatial derivatives use 3-point central differences (one-sided second order
at Dirichlet boundaries); time stepping is classical RK4. Constraint fields
such as ``p^x = -tau u_x`` are recomputed from ``u`` rather than evolved, and
the leftover ``s`` freedom is fixed by the gauges below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .core import contact_hamiltonian_vector_field, section_residuals
from .errors import BlowUpError, OracleError, StabilityError
from .models import BURGERS_NAMES, COUPLED_NAMES, STRING_NAMES
from .section import SectionGrid, SpaceGrid


@dataclass(frozen=True)
class GaugeChoice:
    tag: str
    pinned: tuple


STRING_GAUGE = GaugeChoice("string", ("s_x = 0", "p_x = -tau u_x"))
BURGERS_GAUGE = GaugeChoice("burgers", ("v = 0", "p_x = 0", "s_t = 0", "s_x = 0", "q_x = -diff u_x"))
COUPLED_GAUGE = GaugeChoice("coupled-strings", ("s_x = 0", "p_x_i = -d q_i / dx"))


# -- stencils --------------------------------------------------------------------


def d1_dirichlet(u, dx, closure="ghost"):
    """First derivative along the last axis with end closures.

    ``closure=2`` is the textbook one-sided second-order stencil. The default
    ``"ghost"`` applies the central difference against a cubically
    extrapolated ghost node, ``(-4u0 + 7u1 - 4u2 + u3) / 2dx``. It is also
    second order but shares the leading error of the interior stencil, so the
    x-divergence of a constraint momentum stays O(dx^2) at the first interior
    node instead of dropping to O(dx).
    """
    out = np.empty_like(u)
    out[..., 1:-1] = (u[..., 2:] - u[..., :-2]) / (2.0 * dx)
    if closure == 2:
        out[..., 0] = (-3.0 * u[..., 0] + 4.0 * u[..., 1] - u[..., 2]) / (2.0 * dx)
        out[..., -1] = (3.0 * u[..., -1] - 4.0 * u[..., -2] + u[..., -3]) / (2.0 * dx)
    elif closure == "ghost":
        out[..., 0] = (-4.0 * u[..., 0] + 7.0 * u[..., 1] - 4.0 * u[..., 2] + u[..., 3]) / (2.0 * dx)
        out[..., -1] = (4.0 * u[..., -1] - 7.0 * u[..., -2] + 4.0 * u[..., -3] - u[..., -4]) / (2.0 * dx)
    else:
        raise ValueError("closure must be 2 or 'ghost'")
    return out


def d2_interior(u, dx):
    """Second derivative on interior nodes; zero on the two boundary nodes."""
    out = np.zeros_like(u)
    out[..., 1:-1] = (u[..., 2:] - 2.0 * u[..., 1:-1] + u[..., :-2]) / (dx * dx)
    return out


def d1_periodic(u, dx):
    return (np.roll(u, -1, axis=-1) - np.roll(u, 1, axis=-1)) / (2.0 * dx)


def d2_periodic(u, dx):
    return (np.roll(u, -1, axis=-1) - 2.0 * u + np.roll(u, 1, axis=-1)) / (dx * dx)


# -- time stepping -----------------------------------------------------------------


def fit_step(t_end, limit):
    """Largest step not above ``limit`` that divides ``t_end`` evenly."""
    if t_end <= 0:
        return limit
    return t_end / math.ceil(t_end / limit * (1 - 1e-12))


def _step_count(t_end, dt):
    if dt <= 0:
        raise ValueError("time step must be positive")
    if t_end < 0:
        raise ValueError("t_end must be non-negative")
    n = int(round(t_end / dt))
    if abs(n * dt - t_end) > 1e-9 * max(1.0, t_end):
        raise ValueError(f"t_end={t_end} is not a whole number of steps dt={dt}")
    return n


def rk4(rhs, y0, dt, nsteps, save_every=1):
    """Classical RK4; returns stored times (in steps) and states."""
    if save_every < 1:
        raise ValueError("save_every must be >= 1")
    y = np.array(y0, dtype=float)
    frames = [y.copy()]
    steps = [0]
    for n in range(1, nsteps + 1):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * dt * k1)
        k3 = rhs(y + 0.5 * dt * k2)
        k4 = rhs(y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise BlowUpError(f"solution blew up at t={n * dt:g}", time=n * dt)
        if n % save_every == 0 or n == nsteps:
            frames.append(y.copy())
            steps.append(n)
    return np.array(steps), np.array(frames)


def _uniform_frames(steps, frames, dt):
    # a trailing partial interval would break the uniform spacing needed downstream
    if len(steps) > 2 and steps[-1] - steps[-2] != steps[1] - steps[0]:
        steps, frames = steps[:-1], frames[:-1]
    return steps * dt, frames


def _profile(ic, x):
    values = np.asarray(ic(x) if callable(ic) else ic, dtype=float)
    return np.broadcast_to(values, x.shape).astype(float)


# -- damped string -------------------------------------------------------------------


def string_dt_limit(params, grid):
    return 0.5 * grid.dx / params.c


def coupled_dt_limit(grid):
    return 0.5 * grid.dx


def burgers_dt_limit(params, grid, u0):
    """Largest stable step for the initial profile ``u0``."""
    u = _profile(u0, grid.nodes)
    speed = float(np.abs(u).max()) * abs(params.gamma) * params.diff
    return min(_burgers_limits(params.diff, grid.dx, speed))


def string_constraint_fields(u, params, dx):
    """``p^x = -tau u_x`` on all nodes."""
    return -params.tau * d1_dirichlet(u, dx)


def integrate_damped_string(params, grid, u0, ut0=0.0, t_end=1.0, dt=None, save_every=1):
    """Evolve ``u_tt - c^2 u_xx + damp u_t = 0`` in first-order contact form.

    The state is ``(u, p^t, s^t)`` with ``u_t = p^t/rho``,
    ``p^t_t = tau u_xx - damp p^t`` and
    ``s^t_t = (p^t)^2/2rho - (p^x)^2/2tau - damp s^t``.
    """
    if grid.boundary != "dirichlet-zero":
        raise ValueError("the string solver uses Dirichlet boundaries")
    dx = grid.dx
    limit = 0.5 * dx / params.c
    if dt is None:
        dt = fit_step(t_end, limit)
    if dt > limit * (1 + 1e-12):
        raise StabilityError(f"CFL bound violated: dt={dt:g} > 0.5 dx / c = {limit:g}")
    x = grid.nodes
    u = _profile(u0, x)
    if abs(u[0]) > 1e-12 or abs(u[-1]) > 1e-12:
        raise ValueError("initial displacement must vanish at both ends")
    pt = params.rho * _profile(ut0, x)
    pt[0] = pt[-1] = 0.0
    N = grid.N
    rho, tau, damp = params.rho, params.tau, params.damp

    def rhs(y):
        u, pt, st = y[:N], y[N:2 * N], y[2 * N:]
        px = -tau * d1_dirichlet(u, dx)
        du = pt / rho
        dpt = tau * d2_interior(u, dx) - damp * pt
        du[0] = du[-1] = 0.0
        dpt[0] = dpt[-1] = 0.0
        dst = pt * pt / (2 * rho) - px * px / (2 * tau) - damp * st
        return np.concatenate([du, dpt, dst])

    y0 = np.concatenate([u, pt, np.zeros(N)])
    steps, frames = rk4(rhs, y0, dt, _step_count(t_end, dt), save_every)
    times, frames = _uniform_frames(steps, frames, dt)
    U, PT, ST = frames[:, :N], frames[:, N:2 * N], frames[:, 2 * N:]
    PX = string_constraint_fields(U, params, dx)
    data = np.stack([U, PT, PX, ST, np.zeros_like(U)], axis=-1)
    return SectionGrid(times, x, data, STRING_NAMES, model="damped-string", gauge=STRING_GAUGE.tag,
                       meta={"dt": dt, "save_every": save_every})


def string_energy(psi, params):
    """Discrete energy ``sum (p^t)^2/2rho dx + sum tau/2 (forward u_x)^2 dx`` per stored time."""
    dx = psi.dx
    U, PT = psi.field("u"), psi.field("p_t")
    kinetic = (PT * PT).sum(axis=-1) * dx / (2 * params.rho)
    strain = np.diff(U, axis=-1) / dx
    potential = 0.5 * params.tau * (strain * strain).sum(axis=-1) * dx
    return kinetic + potential


def _mode_amplitude(params, mode, length):
    kappa = mode * math.pi / length
    w2 = params.c2 * kappa * kappa - 0.25 * params.damp ** 2
    if w2 <= 0:
        raise OracleError(f"mode {mode} is not underdamped (c^2 kappa^2 <= damp^2/4)")
    return kappa, math.sqrt(w2)


def modal_string_oracle(params, mode, t, x, x0=0.0, length=1.0):
    """Exact ``u`` for ``u(0) = sin(n pi x / L)``, ``u_t(0) = 0`` on a fixed-end string."""
    kappa, omega = _mode_amplitude(params, mode, length)
    k = params.damp
    t = np.asarray(t, dtype=float)
    amp = np.exp(-0.5 * k * t) * (np.cos(omega * t) + (0.5 * k / omega) * np.sin(omega * t))
    return amp * np.sin(kappa * (np.asarray(x, dtype=float) - x0))


def modal_string_section(params, grid, mode, times):
    """All chart fields of the modal solution, including ``s^t`` in the ``s^x = 0`` gauge.

    With ``u = A(t) sin(kx)``, ``s^t = a(t) sin^2 + b(t) cos^2`` where ``a, b``
    solve linear ODEs integrated here to 1e-13.
    """
    length = grid.length
    kappa, omega = _mode_amplitude(params, mode, length)
    rho, tau, k = params.rho, params.tau, params.damp

    def amp(t):
        return np.exp(-0.5 * k * t) * (np.cos(omega * t) + (0.5 * k / omega) * np.sin(omega * t))

    def amp_rate(t):
        return -np.exp(-0.5 * k * t) * np.sin(omega * t) * params.c2 * kappa ** 2 / omega

    def ode(t, y):
        a, b = y
        return [0.5 * rho * amp_rate(t) ** 2 - k * a, -0.5 * tau * kappa ** 2 * amp(t) ** 2 - k * b]

    times = np.asarray(times, dtype=float)
    if times[-1] > 0:
        sol = solve_ivp(ode, (0.0, times[-1]), [0.0, 0.0], method="DOP853",
                        rtol=1e-13, atol=1e-15, t_eval=times, dense_output=False)
        a, b = sol.y
    else:
        a = b = np.zeros_like(times)
    x = grid.nodes
    sn, cs = np.sin(kappa * (x - grid.x0)), np.cos(kappa * (x - grid.x0))
    A, Ad = amp(times)[:, None], amp_rate(times)[:, None]
    U = A * sn
    PT = rho * Ad * sn
    PX = -tau * kappa * A * cs
    ST = a[:, None] * sn ** 2 + b[:, None] * cs ** 2
    data = np.stack([U, PT, PX, ST, np.zeros_like(U)], axis=-1)
    return SectionGrid(times, x, data, STRING_NAMES, model="damped-string", gauge="modal-oracle")


# -- Burgers / heat ------------------------------------------------------------------------


def _burgers_limits(diff, dx, umax):
    diffusive = 0.25 * dx * dx / diff
    advective = 0.5 * dx / umax if umax > 0 else np.inf
    return diffusive, advective


def _periodic_run(grid, u0, diff, gamma, t_end, dt, save_every, nonlinear):
    if grid.boundary != "periodic":
        raise ValueError("the Burgers solver uses periodic boundaries")
    if diff <= 0:
        raise ValueError("diffusion coefficient must be positive")
    dx = grid.dx
    x = grid.nodes
    u = _profile(u0, x)
    if abs(u[0] - u[-1]) > 1e-10 * (1 + np.abs(u).max()):
        raise ValueError("initial profile is not periodic")
    umax = float(np.abs(u).max()) * (abs(gamma) * diff if nonlinear else 0.0)
    diffusive, advective = _burgers_limits(diff, dx, umax)
    if dt is None:
        dt = fit_step(t_end, min(diffusive, advective))
    if dt > diffusive * (1 + 1e-12) or dt > advective * (1 + 1e-12):
        raise StabilityError(
            f"stability bound violated: dt={dt:g} > min(0.25 dx^2/k = {diffusive:g}, "
            f"0.5 dx/max|u| = {advective:g})"
        )
    scale = gamma * diff

    if nonlinear:
        def rhs(w):
            return diff * d2_periodic(w, dx) + scale * w * d1_periodic(w, dx)
    else:
        def rhs(w):
            return diff * d2_periodic(w, dx)

    steps, frames = rk4(rhs, u[:-1], dt, _step_count(t_end, dt), save_every)
    times, frames = _uniform_frames(steps, frames, dt)
    U = np.concatenate([frames, frames[:, :1]], axis=1)
    return times, x, U, dt


def burgers_section(times, x, U, diff, dx, gauge=BURGERS_GAUGE.tag, meta=None):
    """Embed ``u`` into the Burgers chart with the gauge-pinned fields."""
    zeros = np.zeros_like(U)
    inner = U[:, :-1]
    qx = -diff * d1_periodic(inner, dx)
    QX = np.concatenate([qx, qx[:, :1]], axis=1)
    data = np.stack([U, zeros, zeros, QX, zeros, zeros], axis=-1)
    return SectionGrid(times, x, data, BURGERS_NAMES, model="burgers", gauge=gauge, meta=meta or {})


def integrate_burgers(params, grid, u0, t_end=0.5, dt=None, save_every=1):
    """Evolve ``u_t = diff u_xx + gamma diff u u_x`` on a periodic grid.

    ``gamma = -1/diff`` is Burgers' equation, ``gamma = 0`` the heat equation.
    """
    times, x, U, dt = _periodic_run(grid, u0, params.diff, params.gamma, t_end, dt, save_every, True)
    return burgers_section(times, x, U, params.diff, grid.dx,
                           meta={"dt": dt, "save_every": save_every, "gamma": params.gamma})


def integrate_heat(diff, grid, u0, t_end=0.5, dt=None, save_every=1):
    """Heat equation with the same stencil and stepping as :func:`integrate_burgers`."""
    times, x, U, dt = _periodic_run(grid, u0, diff, 0.0, t_end, dt, save_every, False)
    return burgers_section(times, x, U, diff, grid.dx, meta={"dt": dt, "save_every": save_every})


def _fourier_resolve(samples_fn, x0, length, start=256, limit=1 << 16, cutoff=1e-14):
    """FFT coefficients of a smooth periodic function, doubling the sampling until resolved."""
    M = start
    while True:
        y = x0 + length * np.arange(M) / M
        vals = samples_fn(y, M)
        coef = np.fft.fft(vals) / M
        scale = np.abs(coef).max()
        tail = np.abs(coef[M // 2 - M // 8: M // 2 + M // 8]).max()
        if tail < cutoff * max(scale, 1e-300) or M >= limit:
            return coef, np.fft.fftfreq(M, d=length / M) * 2 * np.pi
        M *= 2


def cole_hopf_oracle(u0, diff, t, x, x0=0.0, x1=1.0):
    """Exact periodic solution of ``u_t + u u_x = diff u_xx`` via the Cole-Hopf transform.

    A nonzero mean ``c`` of ``u0`` is removed by the Galilean shift
    ``u(x, t) = c + w(x - c t, t)``.
    """
    if diff <= 0:
        raise OracleError("diffusion coefficient must be positive")
    if t < 0:
        raise OracleError("oracle time must be non-negative")
    length = x1 - x0
    a, b = float(np.asarray(u0(np.array([x0])))[0]), float(np.asarray(u0(np.array([x1])))[0])
    if abs(a - b) > 1e-10 * (1 + abs(a)):
        raise OracleError("initial profile is not periodic on [x0, x1]")
    mean = {}

    def phi0(y, M):
        vals = np.broadcast_to(np.asarray(u0(y), dtype=float), y.shape)
        spectrum = np.fft.fft(vals)
        c = spectrum[0].real / M
        mean["c"] = c
        kap = np.fft.fftfreq(M, d=length / M) * 2 * np.pi
        spectrum[0] = 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            anti = np.where(kap != 0, spectrum / (1j * kap), 0.0)
        W = np.fft.ifft(anti).real
        return np.exp(-(W - W.min()) / (2.0 * diff))

    coef, kap = _fourier_resolve(phi0, x0, length)
    keep = np.abs(coef) >= 1e-14 * np.abs(coef).max()
    coef, kap = coef[keep], kap[keep]
    coef = coef * np.exp(-diff * kap * kap * t)
    c = mean["c"]
    xi = np.asarray(x, dtype=float) - c * t - x0
    phase = np.exp(1j * np.multiply.outer(xi, kap))
    phi = (phase @ coef).real
    phi_x = (phase @ (1j * kap * coef)).real
    return c - 2.0 * diff * phi_x / phi


def heat_fourier_oracle(u0, diff, t, x, x0=0.0, x1=1.0):
    """Exact periodic heat-equation solution from the Fourier series of ``u0``."""
    length = x1 - x0
    coef, kap = _fourier_resolve(
        lambda y, M: np.broadcast_to(np.asarray(u0(y), dtype=float), y.shape), x0, length)
    keep = np.abs(coef) >= 1e-14 * max(np.abs(coef).max(), 1e-300)
    coef, kap = coef[keep] * np.exp(-diff * kap[keep] ** 2 * t), kap[keep]
    phase = np.exp(1j * np.multiply.outer(np.asarray(x, dtype=float) - x0, kap))
    return (phase @ coef).real


def burgers_oracle(u0, diff, gamma, t, x, x0=0.0, x1=1.0):
    """Exact solution of ``u_t = diff u_xx + gamma diff u u_x`` for any ``gamma``.

    ``w = -gamma diff u`` satisfies the standard viscous Burgers equation.
    """
    if gamma == 0:
        return heat_fourier_oracle(u0, diff, t, x, x0, x1)
    s = -gamma * diff
    w = cole_hopf_oracle(lambda y: s * np.asarray(u0(y), dtype=float), diff, t, x, x0, x1)
    return w / s


# -- coupled strings --------------------------------------------------------------------------


def integrate_coupled_strings(params, grid, q0, q1_0=None, t_end=1.0, dt=None, save_every=1,
                              pt0=None):
    """Evolve two coupled damped strings (unit density and tension).

    ``q0`` gives the initial ``q^1`` profile and ``q1_0`` the initial ``q^2``
    (default zero). Rates: ``q_t = p^t``,
    ``p^t_t = q_xx - G'(z) q / z - gamma p^t`` and
    ``s^t_t = |p^t|^2/2 - |p^x|^2/2 - G(z) - gamma s^t`` with ``p^x = -q_x``.
    """
    if params.px_sign != -1.0:
        raise StabilityError("px_sign=+1 gives an elliptic system; it cannot be integrated in time")
    if grid.boundary != "dirichlet-zero":
        raise ValueError("the coupled-strings solver uses Dirichlet boundaries")
    dx = grid.dx
    limit = 0.5 * dx
    if dt is None:
        dt = fit_step(t_end, limit)
    if dt > limit * (1 + 1e-12):
        raise StabilityError(f"CFL bound violated: dt={dt:g} > 0.5 dx = {limit:g}")
    x = grid.nodes
    N = grid.N
    Q = np.stack([_profile(q0, x), _profile(0.0 if q1_0 is None else q1_0, x)])
    if np.abs(Q[:, [0, -1]]).max() > 1e-12:
        raise ValueError("initial displacements must vanish at both ends")
    PT = np.zeros((2, N)) if pt0 is None else np.stack([_profile(p, x) for p in pt0])
    PT[:, [0, -1]] = 0.0
    G, gamma = params.coupling, params.gamma

    def rhs(y):
        q = y[:2 * N].reshape(2, N)
        pt = y[2 * N:4 * N].reshape(2, N)
        st = y[4 * N:]
        z = np.hypot(q[0], q[1])
        px = -d1_dirichlet(q, dx)
        dq = pt.copy()
        dpt = d2_interior(q, dx) - G.derivative_over_z(z) * q - gamma * pt
        dq[:, [0, -1]] = 0.0
        dpt[:, [0, -1]] = 0.0
        dst = 0.5 * (pt * pt).sum(0) - 0.5 * (px * px).sum(0) - G.value(z) - gamma * st
        return np.concatenate([dq.ravel(), dpt.ravel(), dst])

    y0 = np.concatenate([Q.ravel(), PT.ravel(), np.zeros(N)])
    steps, frames = rk4(rhs, y0, dt, _step_count(t_end, dt), save_every)
    times, frames = _uniform_frames(steps, frames, dt)
    nt = len(times)
    q = frames[:, :2 * N].reshape(nt, 2, N)
    pt = frames[:, 2 * N:4 * N].reshape(nt, 2, N)
    st = frames[:, 4 * N:]
    px = -d1_dirichlet(q, dx)
    data = np.stack([q[:, 0], q[:, 1], pt[:, 0], pt[:, 1], px[:, 0], px[:, 1], st, np.zeros_like(st)],
                    axis=-1)
    return SectionGrid(times, x, data, COUPLED_NAMES, model="coupled-strings",
                       gauge=COUPLED_GAUGE.tag, meta={"dt": dt, "save_every": save_every})


# -- damped oscillator (k = 1) -------------------------------------------------------------------


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    names: tuple

    def write_csv(self, stream):
        from .section import format_float
        stream.write(",".join(("t",) + tuple(self.names)) + "\n")
        for t, row in zip(self.times, self.states):
            stream.write(",".join([format_float(t)] + [format_float(v) for v in row]) + "\n")


def integrate_damped_oscillator(sys, ic, t_end=5.0, dt=1e-3, save_every=1):
    """RK4 integration of the contact Hamiltonian vector field of a 1-contact system."""
    def rhs(y):
        return contact_hamiltonian_vector_field(sys, y)

    steps, frames = rk4(rhs, np.asarray(ic, dtype=float), dt, _step_count(t_end, dt), save_every)
    return Trajectory(steps * dt, frames, sys.coordinate_names)


# -- diagnostics ---------------------------------------------------------------------------------


@dataclass(frozen=True)
class ResidualScan:
    """Norms of the section residuals over interior nodes.

    ``r1`` uses the max-norm of the covector at each node.
    """

    max_r1: float
    mean_r1: float
    max_r2: float
    mean_r2: float
    nodes: int

    @property
    def max(self):
        return max(self.max_r1, self.max_r2)

    @property
    def mean(self):
        return 0.5 * (self.mean_r1 + self.mean_r2)


def residual_scan(sys, psi):
    r1, r2 = section_residuals(sys, psi)
    n1 = np.abs(r1).max(axis=-1)
    n2 = np.abs(r2)
    return ResidualScan(float(n1.max()), float(n1.mean()), float(n2.max()), float(n2.mean()), n2.size)


def observed_orders(errors, ratio=2.0):
    """``log_ratio(e_i / e_{i+1})`` for successive refinements."""
    e = np.asarray(errors, dtype=float)
    return np.log(e[:-1] / e[1:]) / np.log(ratio)
