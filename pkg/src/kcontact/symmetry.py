"""Symmetries of k-contact systems and the dissipation laws they induce."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .chart_calculus import (
    DEFAULT_STEP,
    fd_gradient,
    lie_bracket_fd,
    lie_derivative_function,
    lie_derivative_oneform,
)
from .core import reeb_fields, section_residuals
from .errors import BlowUpError, BoundaryIndexError, DimensionError

KINDS = ("hamiltonian-k-contact", "dynamical", "unknown")

INTEGRABILITY_CAVEAT = (
    "section transport certifies a dynamical symmetry only along the sampled solution; "
    "the k-vector-field statement follows from it only for integrable solution k-vector fields"
)


@dataclass(frozen=True)
class SymmetryCandidate:
    """A vector field together with the kind of symmetry it is claimed to be."""

    field: Callable[[np.ndarray], np.ndarray]
    kind: str = "unknown"
    name: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown symmetry kind {self.kind!r}; expected one of {KINDS}")

    def __call__(self, x):
        return self.field(x)

    def evaluate(self, sys, x):
        x = np.asarray(x, dtype=float)
        y = np.asarray(self.field(x), dtype=float)
        if y.shape[-1] != sys.dim:
            raise DimensionError(f"field has {y.shape[-1]} components, system has {sys.dim}")
        return y


def _as_candidate(Y):
    return Y if isinstance(Y, SymmetryCandidate) else SymmetryCandidate(Y)


def _points(sys, points):
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        raise ValueError("need at least one sample point")
    pts = np.atleast_2d(pts)
    if pts.shape[-1] != sys.dim:
        raise DimensionError(f"points have {pts.shape[-1]} coordinates, system has {sys.dim}")
    return pts


@dataclass(frozen=True)
class HamiltonianSymmetryReport:
    lie_eta: np.ndarray  # max |L_Y eta^a| per a
    lie_H: float
    tol: float
    name: str = ""

    @property
    def passed(self):
        return bool(self.lie_eta.max() < self.tol and self.lie_H < self.tol)

    def rows(self):
        rows = [(f"lie_eta_{a}", float(v)) for a, v in enumerate(self.lie_eta)]
        rows.append(("lie_H", self.lie_H))
        return rows


def check_hamiltonian_symmetry(sys, Y, points, h=DEFAULT_STEP, tol=1e-6):
    """Test ``L_Y eta^a = 0`` for every ``a`` and ``L_Y H = 0`` at the sample points."""
    Y = _as_candidate(Y)
    pts = _points(sys, points)
    Y.evaluate(sys, pts)
    lie_eta = np.array([
        np.abs(lie_derivative_oneform(Y.field, eta, pts, h)).max() for eta in sys.etas
    ])
    lie_H = float(np.abs(lie_derivative_function(Y.field, sys.hamiltonian, pts)).max())
    return HamiltonianSymmetryReport(lie_eta, lie_H, tol, Y.name)


@dataclass(frozen=True)
class ReebPreservationReport:
    brackets: np.ndarray  # max |[Y, R_a]| per a
    tol: float

    @property
    def max_bracket(self):
        return float(self.brackets.max())

    @property
    def passed(self):
        return self.max_bracket < self.tol


def check_reeb_preservation(sys, Y, points, h=DEFAULT_STEP, tol=1e-6):
    """Largest FD bracket ``|[Y, R_a]|`` over sample points and Reeb fields."""
    Y = _as_candidate(Y)
    pts = _points(sys, points)
    Y.evaluate(sys, pts)
    norms = [
        np.linalg.norm(lie_bracket_fd(Y.field, R, pts, h), axis=-1).max() for R in reeb_fields(sys)
    ]
    return ReebPreservationReport(np.array(norms), tol)


@dataclass(frozen=True)
class DissipationLaw:
    """A map ``F: M -> R^k``; ``components(x)`` has shape ``(..., k)``."""

    components: Callable[[np.ndarray], np.ndarray]
    provenance: str = "user-supplied"

    def __call__(self, x):
        values = np.asarray(self.components(np.asarray(x, dtype=float)), dtype=float)
        if not np.all(np.isfinite(values)):
            raise FloatingPointError("dissipation law is not finite at a sampled point")
        return values


def induced_dissipation_law(sys, Y):
    """``F^a = -<eta^a, Y>``, the law attached to a symmetry."""
    Y = _as_candidate(Y)

    def components(x):
        return -np.einsum("...ai,...i->...a", sys.eta_matrix(x), Y.evaluate(sys, x))

    return DissipationLaw(components, f"induced-from-symmetry {Y.name or 'Y'}")


def dissipation_residual_scan(sys, F, psi):
    """``div(F o psi) + sum_a (R_a H) F^a`` on all interior nodes, shape ``(Nt-2, Nx-2)``."""
    if sys.k != 2:
        raise DimensionError("sections on a (t, x) grid need a 2-contact system")
    values = F(psi.data)
    if values.shape[-1] != 2:
        raise DimensionError("dissipation law must have k = 2 components")
    div = (values[2:, 1:-1, 0] - values[:-2, 1:-1, 0]) / (2.0 * psi.dt)
    div = div + (values[1:-1, 2:, 1] - values[1:-1, :-2, 1]) / (2.0 * psi.dx)
    inner = psi.data[1:-1, 1:-1]
    source = np.einsum("...a,...a->...", sys.reeb_hamiltonian(inner), values[1:-1, 1:-1])
    return div + source


def dissipation_residual_section(sys, F, psi, index):
    """Dissipation-law residual at one interior node ``(time_index, space_index)``."""
    it, ix = index
    nt, nx = psi.data.shape[:2]
    if not (0 < it < nt - 1 and 0 < ix < nx - 1):
        raise BoundaryIndexError(f"node {index} is on the grid boundary")
    sub = psi.with_data(psi.data[it - 1: it + 2, ix - 1: ix + 2],
                        times=psi.times[it - 1: it + 2], x=psi.x[ix - 1: ix + 2])
    return float(dissipation_residual_scan(sys, F, sub)[0, 0])


def dissipation_residual_kvector(sys, F, X, x, h=DEFAULT_STEP):
    """``sum_a <dF^a, X_a> + (R_a H) F^a`` at ``x``; ``X`` is a list of k vector fields."""
    x = np.asarray(x, dtype=float)
    if len(X) != sys.k:
        raise DimensionError(f"need {sys.k} vector fields")
    total = np.einsum("...a,...a->...", sys.reeb_hamiltonian(x), F(x))
    for a, Xa in enumerate(X):
        grad = fd_gradient(lambda z, a=a: F(z)[..., a], x, h)
        total = total + np.einsum("...i,...i->...", grad, Xa(x))
    return total


@dataclass(frozen=True)
class ProbeReport:
    """Section residual before and after transport by the flow of ``Y``."""

    before: float
    after: float
    epsilon: float
    tol: float
    caveat: str = INTEGRABILITY_CAVEAT
    details: dict = field(default_factory=dict)

    @property
    def growth(self):
        return self.after - self.before

    @property
    def allowance(self):
        return self.tol + self.epsilon ** 2

    @property
    def passed(self):
        return bool(self.growth <= self.allowance)


def flow(Y, x, epsilon, substeps=16):
    """Time-``epsilon`` flow of ``Y`` from the points ``x`` by RK4 substeps."""
    if substeps < 1:
        raise ValueError("substeps must be >= 1")
    y = np.array(x, dtype=float)
    h = epsilon / substeps
    for _ in range(substeps):
        k1 = Y(y)
        k2 = Y(y + 0.5 * h * k1)
        k3 = Y(y + 0.5 * h * k2)
        k4 = Y(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise BlowUpError("symmetry flow left the chart", time=epsilon)
    return y


def _max_residual(sys, psi):
    r1, r2 = section_residuals(sys, psi)
    return float(max(np.abs(r1).max(), np.abs(r2).max()))


def dynamical_symmetry_probe(sys, Y, psi, epsilon=0.1, tol=1e-6, substeps=16):
    """Transport a solution section by the flow of ``Y`` and re-measure its HDW residual.

    Passes when the residual grows by at most ``tol + epsilon**2``.
    """
    Y = _as_candidate(Y)
    Y.evaluate(sys, psi.data[0, 0])
    moved = psi.with_data(flow(Y.field, psi.data, epsilon, substeps), gauge=psi.gauge + "+flow")
    before = _max_residual(sys, psi)
    after = _max_residual(sys, moved)
    return ProbeReport(before, after, epsilon, tol, details={"name": Y.name})
