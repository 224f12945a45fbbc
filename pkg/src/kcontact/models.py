"""Concrete k-contact systems: canonical models and the physical examples.

Every contact form used here has the shape ``ds - F(x) x dx`` with a constant
matrix ``F``, so components and differentials are assembled from ``F`` by
:func:`linear_form`. Hamiltonians carry analytic gradients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .chart_calculus import CoordinateForm, ScalarField
from .core import DarbouxLayout, KContactSystem


def linear_form(m, s_index, F):
    """The 1-form ``ds - sum_IJ F[I, J] x^J dx^I`` on an m-dimensional chart."""
    F = np.asarray(F, dtype=float)
    e_s = np.zeros(m)
    e_s[s_index] = 1.0
    dform = F - F.T

    def coeffs(x):
        return e_s - np.asarray(x) @ F.T

    def dcoeffs(x):
        x = np.asarray(x)
        return np.broadcast_to(dform, x.shape[:-1] + (m, m)).copy()

    return CoordinateForm(coeffs, dcoeffs)


def canonical_layout(n, k):
    q = tuple(range(n))
    p = tuple(tuple(n + a * n + i for i in range(n)) for a in range(k))
    s = tuple(n + k * n + a for a in range(k))
    return DarbouxLayout(q, p, s)


def darboux_forms(layout, m):
    """Forms ``ds^a - p^a_i dq^i`` for a full layout."""
    forms = []
    for a in range(layout.k):
        F = np.zeros((m, m))
        for i in range(layout.n):
            F[layout.q[i], layout.p[a][i]] = 1.0
        forms.append(linear_form(m, layout.s[a], F))
    return forms


def zero_hamiltonian(m):
    return ScalarField(
        lambda x: np.zeros(np.shape(x)[:-1]),
        lambda x: np.zeros(np.shape(x)),
    )


def _quadratic_hamiltonian(m, diag, linear=None):
    """``H = 1/2 sum diag_I x_I^2 + linear . x``."""
    diag = np.asarray(diag, dtype=float)
    lin = np.zeros(m) if linear is None else np.asarray(linear, dtype=float)

    def value(x):
        x = np.asarray(x)
        return 0.5 * (x * x) @ diag + x @ lin

    def gradient(x):
        return np.asarray(x) * diag + lin

    return ScalarField(value, gradient)


# -- canonical and textbook structures ----------------------------------------------


def build_canonical(n, k, hamiltonian=None):
    """``(+)^k T*R^n x R^k`` with ``eta^a = ds^a - p^a_i dq^i``."""
    if n < 1 or k < 1:
        raise ValueError("canonical model needs n >= 1 and k >= 1")
    lay = canonical_layout(n, k)
    m = n + k * n + k
    names = (
        [f"q{i + 1}" for i in range(n)]
        + [f"p{a + 1}_{i + 1}" for a in range(k) for i in range(n)]
        + [f"s{a + 1}" for a in range(k)]
    )
    return KContactSystem(
        dim=m, k=k, etas=darboux_forms(lay, m),
        hamiltonian=hamiltonian or zero_hamiltonian(m),
        coordinate_names=names, darboux_layout=lay, name=f"canonical(n={n},k={k})",
        params={"n": n, "k": k},
    )


def build_degenerate_duplicate():
    """Negative control: the canonical (1, 2) chart with the second form replaced by the first."""
    base = build_canonical(1, 2)
    return KContactSystem(
        dim=base.dim, k=2, etas=(base.etas[0], base.etas[0]),
        hamiltonian=base.hamiltonian, coordinate_names=base.coordinate_names,
        name="degenerate-duplicate",
    )


EXAMPLE3_NAMES = ("x", "y", "p", "q", "s", "t")


def build_example3(hamiltonian=None):
    """Two forms on R^6: ``ds - (y dx - x dy)/2`` and ``dt - p dx - q dy``."""
    m = 6
    x, y, p, q, s, t = range(6)
    F1 = np.zeros((m, m))
    F1[x, y] = 0.5
    F1[y, x] = -0.5
    F2 = np.zeros((m, m))
    F2[x, p] = 1.0
    F2[y, q] = 1.0
    return KContactSystem(
        dim=m, k=2, etas=(linear_form(m, s, F1), linear_form(m, t, F2)),
        hamiltonian=hamiltonian or zero_hamiltonian(m),
        coordinate_names=EXAMPLE3_NAMES, name="example3",
    )


# -- physical models -------------------------------------------------------------------


@dataclass(frozen=True)
class DampedStringParams:
    rho: float = 1.0
    tau: float = 1.0
    damp: float = 0.0

    def __post_init__(self):
        if self.rho <= 0 or self.tau <= 0:
            raise ValueError("rho and tau must be positive")
        if self.damp < 0:
            raise ValueError("damping constant must be non-negative")

    @property
    def c2(self):
        return self.tau / self.rho

    @property
    def c(self):
        return float(np.sqrt(self.c2))


STRING_NAMES = ("u", "p_t", "p_x", "s_t", "s_x")


def build_damped_string(params):
    """Chart ``(u, p^t, p^x, s^t, s^x)`` with ``H = (p^t)^2/2rho - (p^x)^2/2tau + damp s^t``."""
    lay = DarbouxLayout(q=(0,), p=((1,), (2,)), s=(3, 4))
    m = 5
    H = _quadratic_hamiltonian(
        m, [0.0, 1.0 / params.rho, -1.0 / params.tau, 0.0, 0.0],
        [0.0, 0.0, 0.0, params.damp, 0.0],
    )
    return KContactSystem(
        dim=m, k=2, etas=darboux_forms(lay, m), hamiltonian=H,
        coordinate_names=STRING_NAMES, darboux_layout=lay, name="damped-string", params=params,
    )


@dataclass(frozen=True)
class BurgersParams:
    diff: float = 0.1
    gamma: float = None

    def __post_init__(self):
        if self.diff <= 0:
            raise ValueError("diffusion coefficient must be positive")
        if self.gamma is None:
            object.__setattr__(self, "gamma", -1.0 / self.diff)


BURGERS_NAMES = ("u", "v", "p_x", "q_x", "s_t", "s_x")


def build_burgers(params):
    """Contactified heat system on ``(u, v, p^x, q^x, s^t, s^x)``.

    ``eta^t = ds^t - (u dv - v du)/2``, ``eta^x = ds^x - p^x du - q^x dv`` and
    ``H = -p^x q^x / diff + gamma u s^x``; ``gamma = -1/diff`` gives Burgers.
    """
    m = 6
    u, v, px, qx, st, sx = range(6)
    Ft = np.zeros((m, m))
    Ft[u, v] = -0.5
    Ft[v, u] = 0.5
    Fx = np.zeros((m, m))
    Fx[u, px] = 1.0
    Fx[v, qx] = 1.0
    k, g = params.diff, params.gamma

    def value(x):
        x = np.asarray(x)
        return -x[..., px] * x[..., qx] / k + g * x[..., u] * x[..., sx]

    def gradient(x):
        x = np.asarray(x)
        out = np.zeros(x.shape)
        out[..., u] = g * x[..., sx]
        out[..., px] = -x[..., qx] / k
        out[..., qx] = -x[..., px] / k
        out[..., sx] = g * x[..., u]
        return out

    # only the x-momenta are chart coordinates; the t-momenta are fixed by u, v
    lay = DarbouxLayout(q=(u, v), p=((None, None), (px, qx)), s=(st, sx))
    return KContactSystem(
        dim=m, k=2, etas=(linear_form(m, st, Ft), linear_form(m, sx, Fx)),
        hamiltonian=ScalarField(value, gradient), coordinate_names=BURGERS_NAMES,
        darboux_layout=lay, name="burgers", params=params,
    )


@dataclass(frozen=True)
class Coupling:
    """Rotation-invariant coupling ``G(z)`` with ``z = |(q^1, q^2)|``.

    ``derivative_over_z`` is ``G'(z)/z``, which stays finite at ``z = 0`` for
    smooth couplings and gives the gradient ``G'(z)/z * q`` directly.
    """

    value: Callable[[np.ndarray], np.ndarray]
    derivative_over_z: Callable[[np.ndarray], np.ndarray]
    label: str = "custom"


def harmonic_coupling(strength=1.0):
    """``G(z) = strength * z^2 / 2``."""
    return Coupling(
        lambda z: 0.5 * strength * z * z,
        lambda z: strength * np.ones_like(z),
        label=f"harmonic({strength:g})",
    )


def no_coupling():
    return Coupling(lambda z: np.zeros_like(z), lambda z: np.zeros_like(z), label="none")


def cosine_coupling(strength=1.0):
    """``G(z) = strength (1 - cos z)``: a non-polynomial test coupling."""
    return Coupling(
        lambda z: strength * (1.0 - np.cos(z)),
        lambda z: strength * np.sinc(z / np.pi),
        label=f"cosine({strength:g})",
    )


@dataclass(frozen=True)
class CoupledStringsParams:
    """Two strings with unit density and tension.

    ``px_sign`` multiplies the ``(p^x)^2/2`` term of the Hamiltonian. The
    default ``-1`` is the vibrating-string sign, for which the field equations
    are wave equations; ``+1`` gives the elliptic variant, which is a valid
    k-contact system but not an evolution problem.
    """

    gamma: float = 0.0
    coupling: Coupling = field(default_factory=no_coupling)
    px_sign: float = -1.0

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError("damping rate must be non-negative")
        if self.px_sign not in (-1.0, 1.0):
            raise ValueError("px_sign must be +1 or -1")


COUPLED_NAMES = ("q1", "q2", "p_t1", "p_t2", "p_x1", "p_x2", "s_t", "s_x")


def build_coupled_strings(params):
    """Chart ``(q1, q2, p^t_1, p^t_2, p^x_1, p^x_2, s^t, s^x)``.

    ``H = ((p^t)^2 + px_sign (p^x)^2)/2 + G(z) + gamma s^t``.
    """
    m = 8
    lay = DarbouxLayout(q=(0, 1), p=((2, 3), (4, 5)), s=(6, 7))
    sgn = params.px_sign
    G = params.coupling
    diag = np.array([0, 0, 1, 1, sgn, sgn, 0, 0], dtype=float)

    def value(x):
        x = np.asarray(x)
        z = np.hypot(x[..., 0], x[..., 1])
        return 0.5 * (x * x) @ diag + G.value(z) + params.gamma * x[..., 6]

    def gradient(x):
        x = np.asarray(x)
        z = np.hypot(x[..., 0], x[..., 1])
        out = x * diag
        w = G.derivative_over_z(z)
        out[..., 0] += w * x[..., 0]
        out[..., 1] += w * x[..., 1]
        out[..., 6] += params.gamma
        return out

    return KContactSystem(
        dim=m, k=2, etas=darboux_forms(lay, m), hamiltonian=ScalarField(value, gradient),
        coordinate_names=COUPLED_NAMES, darboux_layout=lay, name="coupled-strings", params=params,
    )


@dataclass(frozen=True)
class OscillatorParams:
    gamma: float = 0.0

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError("dissipation rate must be non-negative")


def build_damped_oscillator(params):
    """``eta = ds - p dq`` and ``H = p^2/2 + q^2/2 + gamma s`` on ``(q, p, s)``."""
    lay = DarbouxLayout(q=(0,), p=((1,),), s=(2,))
    H = _quadratic_hamiltonian(3, [1.0, 1.0, 0.0], [0.0, 0.0, params.gamma])
    return KContactSystem(
        dim=3, k=1, etas=darboux_forms(lay, 3), hamiltonian=H,
        coordinate_names=("q", "p", "s"), darboux_layout=lay, name="oscillator", params=params,
    )


# -- named vector fields ------------------------------------------------------------------


def _field(fn):
    def wrapped(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        fn(x, out)
        return out

    return wrapped


def coordinate_field(index):
    """The coordinate vector field along chart axis ``index``."""
    def fill(x, out):
        out[..., index] = 1.0

    return _field(fill)


def string_translation():
    """``d/du`` on the damped string chart."""
    return coordinate_field(0)


def strings_rotation():
    """Simultaneous rotation of ``q``, ``p^t`` and ``p^x`` in the coupled-strings chart."""
    def fill(x, out):
        for a, b in ((0, 1), (2, 3), (4, 5)):
            out[..., a] = -x[..., b]
            out[..., b] = x[..., a]

    return _field(fill)


def burgers_shift_v():
    """``d/dv`` on the Burgers chart."""
    return coordinate_field(1)


def burgers_shift_v_compensated():
    """``d/dv - (u/2) d/ds^t``: the shift of ``v`` corrected to preserve ``eta^t``."""
    def fill(x, out):
        out[..., 1] = 1.0
        out[..., 4] = -0.5 * x[..., 0]

    return _field(fill)


def burgers_scaling_u():
    """``u d/du``."""
    def fill(x, out):
        out[..., 0] = x[..., 0]

    return _field(fill)


MODEL_BUILDERS = {
    "canonical": build_canonical,
    "example3": build_example3,
    "degenerate-duplicate": build_degenerate_duplicate,
    "damped-string": build_damped_string,
    "burgers": build_burgers,
    "coupled-strings": build_coupled_strings,
    "oscillator": build_damped_oscillator,
}
