"""Pointwise multilinear algebra and finite-difference operators on one chart.

Conventions used throughout the package:

* A point is a float array whose last axis has length ``m``. Every field in
  this package broadcasts over leading axes, so the same callables evaluate a
  single point ``(m,)`` or a whole grid ``(..., m)``.
* A 2-form is an antisymmetric ``(m, m)`` matrix. For ``eta = eta_I dx^I`` the
  exterior derivative has components ``d(eta)_IJ = d_I eta_J - d_J eta_I``.
* Contraction acts on the first slot: ``i(v)w (.) = w(v, .)``, i.e.
  ``(i(v)w)_J = sum_I v^I w_IJ``.
* Wedge of 1-forms: ``(a ^ b)_IJ = a_I b_J - a_J b_I``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DimensionError, NonFiniteError

DEFAULT_STEP = 1e-5
DEFAULT_RANK_TOL = 1e-9

VectorField = Callable[[np.ndarray], np.ndarray]


def _check_finite(arr, what):
    arr = np.asarray(arr, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"non-finite value in {what}")
    return arr


@dataclass(frozen=True)
class ScalarField:
    """A scalar function on the chart with an optional analytic gradient.

    When ``gradient`` is omitted, :meth:`grad` falls back to central
    differences with step ``fd_step``.
    """

    value: Callable[[np.ndarray], np.ndarray]
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None
    fd_step: float = DEFAULT_STEP

    def __call__(self, x):
        return self.value(np.asarray(x, dtype=float))

    def grad(self, x):
        x = np.asarray(x, dtype=float)
        if self.gradient is None:
            return fd_gradient(self.value, x, self.fd_step)
        return np.asarray(self.gradient(x), dtype=float)


@dataclass(frozen=True)
class CoordinateForm:
    """A 1-form given by its component functions and those of its differential."""

    coeffs: Callable[[np.ndarray], np.ndarray]
    dcoeffs: Optional[Callable[[np.ndarray], np.ndarray]] = None
    fd_step: float = DEFAULT_STEP

    def __call__(self, x):
        return np.asarray(self.coeffs(np.asarray(x, dtype=float)), dtype=float)

    def d(self, x):
        """Components of the exterior derivative at ``x``."""
        x = np.asarray(x, dtype=float)
        if self.dcoeffs is None:
            return fd_exterior_derivative(self.coeffs, x, self.fd_step)
        return np.asarray(self.dcoeffs(x), dtype=float)


def constant_field(vector):
    """Vector field with the same components everywhere."""
    vector = np.asarray(vector, dtype=float)

    def field(x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != vector.shape[-1]:
            raise DimensionError(f"field has {vector.shape[-1]} components, point has {x.shape[-1]}")
        return np.broadcast_to(vector, x.shape).copy()

    return field


def interior_product_2form(omega, v):
    """Contract the vector ``v`` into the first slot of the 2-form ``omega``."""
    omega = np.asarray(omega, dtype=float)
    v = np.asarray(v, dtype=float)
    if omega.shape[-1] != omega.shape[-2] or omega.shape[-1] != v.shape[-1]:
        raise DimensionError(
            f"cannot contract vector of length {v.shape[-1]} into form of shape {omega.shape[-2:]}"
        )
    return np.einsum("...i,...ij->...j", v, omega)


def wedge(a, b):
    """Wedge product of two 1-forms as an antisymmetric matrix."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape[-1] != b.shape[-1]:
        raise DimensionError("wedge of covectors with different lengths")
    outer = a[..., :, None] * b[..., None, :]
    return outer - np.swapaxes(outer, -1, -2)


def pairing(form, v):
    """Evaluate covector(s) on vector(s), summing over the last axis."""
    form = np.asarray(form, dtype=float)
    v = np.asarray(v, dtype=float)
    if form.shape[-1] != v.shape[-1]:
        raise DimensionError("covector and vector lengths differ")
    return np.einsum("...i,...i->...", form, v)


def fd_gradient(f, x, h=DEFAULT_STEP):
    """Central-difference gradient of a scalar function.

    ``f`` must broadcast over leading axes of ``x``; the result has the shape
    of ``x``.
    """
    if h <= 0:
        raise ValueError("finite-difference step must be positive")
    x = np.asarray(x, dtype=float)
    m = x.shape[-1]
    grad = np.empty_like(x)
    for i in range(m):
        e = np.zeros(m)
        e[i] = h
        fp = _check_finite(f(x + e), "function evaluation")
        fm = _check_finite(f(x - e), "function evaluation")
        grad[..., i] = (fp - fm) / (2.0 * h)
    return grad


def fd_exterior_derivative(coeffs, x, h=DEFAULT_STEP):
    """Exterior derivative of a 1-form from central differences of its components."""
    if h <= 0:
        raise ValueError("finite-difference step must be positive")
    x = np.asarray(x, dtype=float)
    m = x.shape[-1]
    # jac[..., I, J] = d_I eta_J
    jac = np.empty(x.shape + (m,))
    for i in range(m):
        e = np.zeros(m)
        e[i] = h
        jac[..., i, :] = (
            _check_finite(coeffs(x + e), "form evaluation")
            - _check_finite(coeffs(x - e), "form evaluation")
        ) / (2.0 * h)
    return jac - np.swapaxes(jac, -1, -2)


def directional_derivative_fd(F, x, v, h=DEFAULT_STEP):
    """Central difference of ``F`` along the direction ``v`` at ``x``."""
    if h <= 0:
        raise ValueError("finite-difference step must be positive")
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    fp = _check_finite(F(x + h * v), "field evaluation")
    fm = _check_finite(F(x - h * v), "field evaluation")
    return (fp - fm) / (2.0 * h)


def lie_bracket_fd(X, Y, x, h=DEFAULT_STEP):
    """Lie bracket ``[X, Y]^i = X(Y^i) - Y(X^i)`` by central differences."""
    x = np.asarray(x, dtype=float)
    Xx = _check_finite(X(x), "field evaluation")
    Yx = _check_finite(Y(x), "field evaluation")
    if Xx.shape != x.shape or Yx.shape != x.shape:
        raise DimensionError("vector field output does not match the chart dimension")
    return directional_derivative_fd(Y, x, Xx, h) - directional_derivative_fd(X, x, Yx, h)


def lie_derivative_function(Y, f, x):
    """``L_Y f = <df, Y>`` for a :class:`ScalarField`."""
    return pairing(f.grad(x), Y(np.asarray(x, dtype=float)))


def lie_derivative_oneform(Y, eta, x, h=DEFAULT_STEP):
    """Lie derivative of a 1-form via Cartan's formula ``i(Y)d(eta) + d(i(Y)eta)``."""
    x = np.asarray(x, dtype=float)
    Yx = _check_finite(Y(x), "field evaluation")
    contracted = interior_product_2form(eta.d(x), Yx)
    exact = fd_gradient(lambda z: pairing(eta(z), Y(z)), x, h)
    return contracted + exact


def singular_values(matrix):
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    if matrix.size == 0:
        return np.zeros(0)
    return np.linalg.svd(matrix, compute_uv=False)


def rank_with_tolerance(rows, tol=DEFAULT_RANK_TOL):
    """Numerical rank: singular values above ``tol`` times the largest one."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    sv = singular_values(rows) if len(rows) else np.zeros(0)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > tol * sv[0]))


def nullspace_with_tolerance(matrix, tol=DEFAULT_RANK_TOL, ncols=None):
    """Orthonormal basis (as columns) of the numerical nullspace.

    ``ncols`` gives the column count for an empty matrix, whose nullspace is
    the whole space.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    matrix = np.asarray(matrix, dtype=float)
    if matrix.size == 0:
        n = ncols if ncols is not None else (matrix.shape[-1] if matrix.ndim == 2 else 0)
        return np.eye(n)
    matrix = np.atleast_2d(matrix)
    _, sv, vt = np.linalg.svd(matrix)
    if sv[0] == 0.0:
        return np.eye(matrix.shape[1])
    rank = int(np.sum(sv > tol * sv[0]))
    return vt[rank:].T.copy()
