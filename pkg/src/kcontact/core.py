"""k-contact systems: structure checks, Reeb fields and the field equations.

All residual functions follow the component conventions documented in
:mod:`kcontact.chart_calculus`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .chart_calculus import (
    DEFAULT_RANK_TOL,
    DEFAULT_STEP,
    CoordinateForm,
    ScalarField,
    interior_product_2form,
    lie_bracket_fd,
    lie_derivative_oneform,
    pairing,
    singular_values,
    wedge,
)
from .errors import (
    BoundaryIndexError,
    DimensionError,
    LayoutError,
    OutsideOpenSetError,
    StructureError,
)

OPEN_SET_THRESHOLD = 1e-12


@dataclass(frozen=True)
class DarbouxLayout:
    """Positions of ``q^i``, ``p^a_i`` and ``s^a`` among the chart coordinates.

    ``p[a][i]`` may be ``None`` when the momentum of ``q^i`` along direction
    ``a`` is not an independent coordinate (a partially canonical chart such
    as the Burgers phase space). A layout without ``None`` entries is *full*
    and then ``m = n + k n + k``.
    """

    q: tuple
    p: tuple
    s: tuple

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(self.q))
        object.__setattr__(self, "p", tuple(tuple(row) for row in self.p))
        object.__setattr__(self, "s", tuple(self.s))
        if len(self.p) != len(self.s) or any(len(row) != len(self.q) for row in self.p):
            raise LayoutError("momentum table must be k x n")

    @property
    def n(self):
        return len(self.q)

    @property
    def k(self):
        return len(self.s)

    @property
    def full(self):
        return all(idx is not None for row in self.p for idx in row)

    def indices(self):
        flat = list(self.q) + [i for row in self.p for i in row if i is not None] + list(self.s)
        return flat


@dataclass(frozen=True)
class KContactSystem:
    """A chart with ``k`` contact forms and a Hamiltonian."""

    dim: int
    k: int
    etas: tuple
    hamiltonian: ScalarField
    coordinate_names: tuple
    darboux_layout: Optional[DarbouxLayout] = None
    name: str = ""
    params: object = None

    def __post_init__(self):
        object.__setattr__(self, "etas", tuple(self.etas))
        object.__setattr__(self, "coordinate_names", tuple(self.coordinate_names))
        if self.k < 1 or self.k > self.dim:
            raise DimensionError(f"need 1 <= k <= m, got k={self.k}, m={self.dim}")
        if len(self.etas) != self.k:
            raise DimensionError(f"expected {self.k} forms, got {len(self.etas)}")
        if len(self.coordinate_names) != self.dim:
            raise DimensionError("one coordinate name per chart dimension required")
        lay = self.darboux_layout
        if lay is not None:
            idx = lay.indices()
            if lay.k != self.k or len(set(idx)) != len(idx) or len(idx) != self.dim:
                raise LayoutError("Darboux layout does not partition the chart coordinates")
            if lay.full and self.dim != lay.n + lay.k * lay.n + lay.k:
                raise LayoutError("full Darboux layout requires m = n + kn + k")

    # -- pointwise ingredients -------------------------------------------------

    def _as_points(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise DimensionError(f"point has {x.shape[-1]} coordinates, chart has {self.dim}")
        return x

    def eta_matrix(self, x):
        """Coefficients of all contact forms, shape ``(..., k, m)``."""
        x = self._as_points(x)
        rows = [eta(x) for eta in self.etas]
        for r in rows:
            if r.shape != x.shape:
                raise DimensionError("contact form components do not match the chart dimension")
        return np.stack(rows, axis=-2)

    def deta(self, x):
        """Differentials of the contact forms, shape ``(..., k, m, m)``."""
        x = self._as_points(x)
        mats = [eta.d(x) for eta in self.etas]
        for mat in mats:
            if mat.shape != x.shape + (self.dim,):
                raise DimensionError("contact form differential does not match the chart dimension")
        return np.stack(mats, axis=-3)

    def H(self, x):
        return np.asarray(self.hamiltonian(self._as_points(x)), dtype=float)

    def dH(self, x):
        return self.hamiltonian.grad(self._as_points(x))

    def reeb_vectors(self, x):
        """Reeb vectors at one or many points, shape ``(..., k, m)``.

        Batched pseudo-inverse of the stacked defining system; use
        :func:`solve_reeb` for residual diagnostics and error reporting.
        """
        A = _reeb_system(self, x)
        B = _reeb_rhs(self)
        return np.swapaxes(np.linalg.pinv(A) @ B, -1, -2)

    def reeb_hamiltonian(self, x):
        """``L_{R_a} H`` for every ``a``, shape ``(..., k)``."""
        R = self.reeb_vectors(x)
        return np.einsum("...am,...m->...a", R, self.dH(x))


def _reeb_system(sys, x):
    """Stack ``eta`` rows over the matrices of ``v -> i(v) d(eta^a)``."""
    E = sys.eta_matrix(x)
    W = np.swapaxes(sys.deta(x), -1, -2)
    W = W.reshape(W.shape[:-3] + (sys.k * sys.dim, sys.dim))
    return np.concatenate([E, W], axis=-2)


def _reeb_rhs(sys):
    B = np.zeros((sys.k + sys.k * sys.dim, sys.k))
    B[: sys.k] = np.eye(sys.k)
    return B


# -- structure verification ----------------------------------------------------


@dataclass
class StructureReport:
    """Outcome of sampling the k-contact conditions.

    Margins are singular values normalized by the largest one of the same
    matrix: ``min_retained`` is the smallest value counted towards a rank,
    ``max_discarded`` the largest value treated as zero.
    """

    points: np.ndarray
    rank_cc: np.ndarray
    dim_dr: np.ndarray
    dim_intersection: np.ndarray
    passes: dict
    min_retained: float
    max_discarded: float
    tol: float
    k: int

    @property
    def ok(self):
        return all(self.passes.values())

    @property
    def failed_conditions(self):
        return [c for c, good in self.passes.items() if not good]

    def rows(self):
        """Per-point table used by the CLI reports."""
        out = []
        for i, pt in enumerate(self.points):
            out.append({
                "point": i,
                "rank_cc": int(self.rank_cc[i]),
                "dim_dr": int(self.dim_dr[i]),
                "dim_intersection": int(self.dim_intersection[i]),
                "coords": pt,
            })
        return out


def _rank_and_margins(matrix, tol):
    sv = singular_values(matrix)
    if sv.size == 0 or sv[0] == 0.0:
        return 0, np.inf, 0.0
    rel = sv / sv[0]
    keep = rel > tol
    rank = int(keep.sum())
    retained = float(rel[keep].min()) if rank else np.inf
    discarded = float(rel[~keep].max()) if rank < rel.size else 0.0
    return rank, retained, discarded


def verify_structure(sys, points, tol=DEFAULT_RANK_TOL):
    """Check the three k-contact conditions at each sample point.

    (i) the contact forms have rank k; (ii) the common kernel of their
    differentials has dimension k; (iii) that kernel meets the common kernel
    of the forms only in zero.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[0] == 0:
        raise ValueError("at least one sample point is required")
    if points.shape[-1] != sys.dim:
        raise DimensionError("sample points do not match the chart dimension")
    m, k = sys.dim, sys.k
    E = sys.eta_matrix(points)
    W = np.swapaxes(sys.deta(points), -1, -2).reshape(points.shape[0], k * m, m)
    rank_cc = np.zeros(len(points), dtype=int)
    dim_dr = np.zeros(len(points), dtype=int)
    dim_int = np.zeros(len(points), dtype=int)
    retained, discarded = np.inf, 0.0
    for i in range(len(points)):
        r1, a1, b1 = _rank_and_margins(E[i], tol)
        r2, a2, b2 = _rank_and_margins(W[i], tol)
        r3, a3, b3 = _rank_and_margins(np.vstack([W[i], E[i]]), tol)
        rank_cc[i] = r1
        dim_dr[i] = m - r2
        dim_int[i] = m - r3
        retained = min(retained, a1, a2, a3)
        discarded = max(discarded, b1, b2, b3)
    passes = {
        "i": bool(np.all(rank_cc == k)),
        "ii": bool(np.all(dim_dr == k)),
        "iii": bool(np.all(dim_int == 0)),
    }
    return StructureReport(points, rank_cc, dim_dr, dim_int, passes, retained, discarded, tol, k)


# -- Reeb fields ---------------------------------------------------------------


@dataclass(frozen=True)
class ReebFrame:
    vectors: np.ndarray
    residual: float


def solve_reeb(sys, x, tol=1e-10):
    """Solve ``<eta^a, R_b> = delta^a_b`` and ``i(R_b) d(eta^a) = 0`` at ``x``."""
    x = sys._as_points(x)
    if x.ndim != 1:
        raise DimensionError("solve_reeb takes a single point")
    A = _reeb_system(sys, x)
    B = _reeb_rhs(sys)
    sol, _, rank, _ = np.linalg.lstsq(A, B, rcond=None)
    residual = float(np.abs(A @ sol - B).max())
    if rank < sys.dim or residual > tol:
        report = verify_structure(sys, x[None, :])
        failed = report.failed_conditions or ["ii"]
        raise StructureError(
            f"Reeb system unsolvable at {x.tolist()}: condition(s) {', '.join(failed)} violated "
            f"(rank {rank}/{sys.dim}, residual {residual:.3g})",
            condition=failed[0],
        )
    return ReebFrame(sol.T.copy(), residual)


def reeb_fields(sys):
    """The Reeb vector fields as callables (batched evaluation)."""
    return [lambda x, a=a: sys.reeb_vectors(x)[..., a, :] for a in range(sys.k)]


def reeb_commutator_norm(sys, x, h=DEFAULT_STEP):
    """Largest Euclidean norm of ``[R_a, R_b](x)`` over ``a < b``."""
    solve_reeb(sys, x)
    fields = reeb_fields(sys)
    worst = 0.0
    for a in range(sys.k):
        for b in range(a + 1, sys.k):
            br = lie_bracket_fd(fields[a], fields[b], x, h)
            worst = max(worst, float(np.linalg.norm(br)))
    return worst


# -- field equations ------------------------------------------------------------


def hdw_residual_kvector(sys, X, x):
    """Residuals of the k-contact HDW equations for a k-vector at ``x``.

    ``r1 = sum_a i(X_a) d(eta^a) - dH + sum_a (R_a H) eta^a`` and
    ``r2 = sum_a <eta^a, X_a> + H``. Both vanish exactly for solutions.
    Works on batches: ``X`` shape ``(..., k, m)``, ``x`` shape ``(..., m)``.
    """
    x = sys._as_points(x)
    X = np.asarray(X, dtype=float)
    if X.shape[-2:] != (sys.k, sys.dim):
        raise DimensionError(f"k-vector must have shape (k, m) = ({sys.k}, {sys.dim})")
    dE = sys.deta(x)
    E = sys.eta_matrix(x)
    contraction = np.einsum("...ai,...aij->...j", X, dE)
    dissipation = np.einsum("...a,...aj->...j", sys.reeb_hamiltonian(x), E)
    r1 = contraction - sys.dH(x) + dissipation
    r2 = np.einsum("...ai,...ai->...", E, X) + sys.H(x)
    return r1, r2


def ksymplectic_residual(sys, X, x):
    """``sum_a i(X_a) w^a - dH`` with ``w^a = d(eta^a)``; the contactless HDW residual."""
    x = sys._as_points(x)
    X = np.asarray(X, dtype=float)
    return np.einsum("...ai,...aij->...j", X, sys.deta(x)) - sys.dH(x)


def section_residuals(sys, psi):
    """HDW residuals of a section on every interior node.

    The prolongation is taken from central differences of the stored data.
    Returns ``(r1, r2)`` shaped ``(Nt-2, Nx-2, m)`` and ``(Nt-2, Nx-2)``.
    """
    if sys.k != 2:
        raise DimensionError("sections on a (t, x) grid need a 2-contact system")
    if psi.data.shape[-1] != sys.dim:
        raise DimensionError("section coordinates do not match the system")
    if psi.data.shape[0] < 3 or psi.data.shape[1] < 3:
        raise BoundaryIndexError("section has no interior nodes")
    pts, d_dt, d_dx = psi.partials()
    X = np.stack([d_dt, d_dx], axis=-2)
    return hdw_residual_kvector(sys, X, pts)


def hdw_residual_section(sys, psi, index):
    """HDW residuals at one interior grid node ``index = (time_index, space_index)``."""
    it, ix = index
    nt, nx = psi.data.shape[:2]
    if not (0 < it < nt - 1 and 0 < ix < nx - 1):
        raise BoundaryIndexError(f"node {index} is on the grid boundary")
    sub = psi.with_data(psi.data[it - 1: it + 2, ix - 1: ix + 2],
                        times=psi.times[it - 1: it + 2], x=psi.x[ix - 1: ix + 2])
    r1, r2 = section_residuals(sys, sub)
    return r1[0, 0], float(r2[0, 0])


def lie_form_residual(sys, X_fields, x, h=DEFAULT_STEP):
    """``sum_a L_{X_a} eta^a + (R_a H) eta^a`` at ``x`` for k vector fields."""
    x = sys._as_points(x)
    if len(X_fields) != sys.k:
        raise DimensionError(f"need {sys.k} vector fields")
    total = np.einsum("...a,...aj->...j", sys.reeb_hamiltonian(x), sys.eta_matrix(x))
    for Xa, eta in zip(X_fields, sys.etas):
        total = total + lie_derivative_oneform(Xa, eta, x, h)
    return total


def omega_forms(sys, x):
    """``W^a = -H d(eta^a) + dH ^ eta^a``, shape ``(..., k, m, m)``."""
    x = sys._as_points(x)
    H = sys.H(x)
    dH = sys.dH(x)
    E = sys.eta_matrix(x)
    return -H[..., None, None, None] * sys.deta(x) + wedge(dH[..., None, :], E)


def residual_no_reeb(sys, X, x, threshold=OPEN_SET_THRESHOLD):
    """Residuals of the Reeb-free form: ``sum_a i(X_a) W^a`` and ``sum_a <eta^a, X_a> + H``."""
    x = sys._as_points(x)
    H = sys.H(x)
    if np.any(np.abs(H) <= threshold):
        raise OutsideOpenSetError("outside open set O: the Hamiltonian vanishes at the point")
    X = np.asarray(X, dtype=float)
    r1 = np.einsum("...ai,...aij->...j", X, omega_forms(sys, x))
    r2 = np.einsum("...ai,...ai->...", sys.eta_matrix(x), X) + H
    return r1, r2


# -- Darboux coordinates ----------------------------------------------------------


@dataclass(frozen=True)
class DarbouxRates:
    """Right-hand sides of the canonical-coordinate field equations.

    ``q_rates[a, i]`` is the prescribed ``dq^i/dt^a`` (NaN where the momentum
    is not a chart coordinate); ``p_divergence[i]`` is the prescribed
    ``sum_a dp^a_i/dt^a``; ``s_divergence`` is ``sum_a ds^a/dt^a``. The two
    divergences are only defined for full layouts.
    """

    q_rates: np.ndarray
    p_divergence: Optional[np.ndarray]
    s_divergence: Optional[float]


def _require_layout(sys):
    if sys.darboux_layout is None:
        raise LayoutError(f"system {sys.name or '<unnamed>'} has no Darboux layout")
    return sys.darboux_layout


def darboux_hdw_rhs(sys, x):
    lay = _require_layout(sys)
    x = sys._as_points(x)
    g = sys.dH(x)
    H = sys.H(x)
    q_rates = np.full((lay.k, lay.n), np.nan)
    for a in range(lay.k):
        for i in range(lay.n):
            if lay.p[a][i] is not None:
                q_rates[a, i] = g[lay.p[a][i]]
    if not lay.full:
        return DarbouxRates(q_rates, None, None)
    Hs = g[list(lay.s)]
    p_div = np.array([
        -(g[lay.q[i]] + sum(x[lay.p[a][i]] * Hs[a] for a in range(lay.k)))
        for i in range(lay.n)
    ])
    s_div = float(sum(x[lay.p[a][i]] * g[lay.p[a][i]]
                      for a in range(lay.k) for i in range(lay.n)) - H)
    return DarbouxRates(q_rates, p_div, s_div)


def contact_hamiltonian_vector_field(sys, x):
    """The contact Hamiltonian vector field of a 1-contact system in canonical coordinates."""
    if sys.k != 1:
        raise LayoutError("the contact Hamiltonian vector field needs k = 1")
    lay = _require_layout(sys)
    if not lay.full:
        raise LayoutError("contact Hamiltonian vector field needs a full Darboux layout")
    x = sys._as_points(x)
    g = sys.dH(x)
    H = sys.H(x)
    Hs = g[..., lay.s[0]]
    out = np.zeros_like(x)
    s_rate = -H
    for i in range(lay.n):
        qi, pi = lay.q[i], lay.p[0][i]
        out[..., qi] = g[..., pi]
        out[..., pi] = -(g[..., qi] + x[..., pi] * Hs)
        s_rate = s_rate + x[..., pi] * g[..., pi]
    out[..., lay.s[0]] = s_rate
    return out


def darboux_kvector(sys, x, free=None, split_energy=False):
    """A solution k-vector at ``x`` assembled from the canonical-coordinate formulas.

    The formulas fix ``(X_a)^{q^i}``, the traces ``sum_a (X_a)^{p^a_i}`` and
    ``sum_a (X_a)^{s^a}``. Every other component is taken from ``free(x)``
    (shape ``(k, m)``, default zero); the traces are closed on the first
    direction. With ``split_energy=True`` the free components are corrected
    (minimum norm) so that also ``X_a(H) = -H (R_a H)`` for each ``a``, which
    makes the k-vector solve the Reeb-free equations too.
    """
    lay = _require_layout(sys)
    if not lay.full:
        raise LayoutError("darboux_kvector needs a full Darboux layout")
    x = sys._as_points(x)
    if x.ndim != 1:
        raise DimensionError("darboux_kvector takes a single point")
    k, n = lay.k, lay.n
    X = np.zeros((k, sys.dim)) if free is None else np.array(free(x), dtype=float)
    if X.shape != (k, sys.dim):
        raise DimensionError("free components must have shape (k, m)")
    rates = darboux_hdw_rhs(sys, x)
    for a in range(k):
        for i in range(n):
            X[a, lay.q[i]] = rates.q_rates[a, i]
    for i in range(n):
        rest = sum(X[a, lay.p[a][i]] for a in range(1, k))
        X[0, lay.p[0][i]] = rates.p_divergence[i] - rest
    X[0, lay.s[0]] = rates.s_divergence - sum(X[a, lay.s[a]] for a in range(1, k))
    if split_energy:
        X = _split_energy(sys, lay, x, X)
    return X


def _split_energy(sys, lay, x, X):
    k, m = lay.k, sys.dim
    g = sys.dH(x)
    target = -sys.H(x) * g[list(lay.s)]
    directions = []
    q_set = set(lay.q)
    for a in range(k):
        for j in range(m):
            if j in q_set:
                continue
            own = j == lay.s[a] or j in lay.p[a]
            if own and a == 0:
                continue
            D = np.zeros((k, m))
            D[a, j] = 1.0
            if own:
                # keep the trace fixed by moving the same amount off direction 0
                j0 = lay.s[0] if j == lay.s[a] else lay.p[0][lay.p[a].index(j)]
                D[0, j0] = -1.0
            directions.append(D)
    M = np.array([D @ g for D in directions]).T
    defect = target - X @ g
    coef, *_ = np.linalg.lstsq(M, defect, rcond=None)
    return X + np.tensordot(coef, np.array(directions), axes=1)
