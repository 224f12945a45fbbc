import numpy as np
import pytest

from kcontact.chart_calculus import wedge
from kcontact.core import darboux_hdw_rhs, solve_reeb, verify_structure
from kcontact.errors import LayoutError
from kcontact.models import (
    MODEL_BUILDERS,
    BurgersParams,
    CoupledStringsParams,
    DampedStringParams,
    OscillatorParams,
    build_burgers,
    build_canonical,
    build_coupled_strings,
    build_damped_oscillator,
    build_damped_string,
    build_example3,
    cosine_coupling,
    harmonic_coupling,
    no_coupling,
)


def zoo():
    return [
        build_canonical(1, 1), build_canonical(1, 2), build_canonical(2, 3),
        build_example3(),
        build_damped_string(DampedStringParams(1.2, 0.8, 0.3)),
        build_burgers(BurgersParams(0.1)),
        build_coupled_strings(CoupledStringsParams(0.2, harmonic_coupling())),
        build_coupled_strings(CoupledStringsParams(0.2, cosine_coupling())),
        build_damped_oscillator(OscillatorParams(0.3)),
    ]


@pytest.mark.parametrize("sys", zoo(), ids=lambda s: s.name)
def test_zoo_structure_with_margin(sys):
    pts = np.random.default_rng(11).uniform(-1, 1, size=(50, sys.dim))
    report = verify_structure(sys, pts)
    assert report.ok
    assert report.min_retained > 1e-6


def test_canonical_contact_form():
    sys = build_canonical(1, 1)
    x = np.array([0.5, 2.0, -1.0])
    assert np.allclose(sys.eta_matrix(x)[0], [-2.0, 0.0, 1.0])


def test_canonical_two_forms():
    sys = build_canonical(1, 2)
    assert sys.dim == 5
    x = np.array([0.1, 0.2, 0.3, 0.4, 0.5])
    assert np.allclose(sys.eta_matrix(x), [[-0.2, 0, 0, 1, 0], [-0.3, 0, 0, 0, 1]])


def test_example3_differentials():
    sys = build_example3()
    e = np.eye(6)
    x_, y_, p_, q_ = e[0], e[1], e[2], e[3]
    d = sys.deta(np.random.default_rng(0).normal(size=6))
    assert np.allclose(d[0], wedge(x_, y_))
    assert np.allclose(d[1], wedge(x_, p_) + wedge(y_, q_))


def test_string_rates():
    p = DampedStringParams(rho=1.5, tau=2.0, damp=0.4)
    sys = build_damped_string(p)
    x = np.array([0.3, 0.9, -0.6, 0.2, 0.0])
    rates = darboux_hdw_rhs(sys, x)
    assert np.isclose(rates.q_rates[0, 0], 0.9 / 1.5)
    # du/dx = -p^x / tau
    assert np.isclose(rates.q_rates[1, 0], 0.6 / 2.0)
    assert np.isclose(rates.p_divergence[0], -0.4 * 0.9)


def test_string_undamped_has_no_reeb_dissipation():
    sys = build_damped_string(DampedStringParams(damp=0.0))
    x = np.random.default_rng(1).normal(size=(10, 5))
    assert np.abs(sys.reeb_hamiltonian(x)).max() < 1e-14


def test_burgers_forms():
    sys = build_burgers(BurgersParams(0.1))
    du, dv = np.eye(6)[0], np.eye(6)[1]
    assert np.allclose(sys.deta(np.zeros(6))[0], -wedge(du, dv))
    assert np.allclose(solve_reeb(sys, np.ones(6)).vectors, np.eye(6)[[4, 5]], atol=1e-12)


def test_burgers_gamma_only_changes_hamiltonian():
    a, b = build_burgers(BurgersParams(0.1)), build_burgers(BurgersParams(0.1, 0.0))
    x = np.random.default_rng(2).normal(size=(5, 6))
    assert np.array_equal(a.eta_matrix(x), b.eta_matrix(x))
    assert not np.allclose(a.H(x), b.H(x))


def test_burgers_gauge_reproduces_equation():
    # in the gauge v = p^x = s^x = 0 the v-row of the equations reads
    # u_t = -dq^x/dx - gamma u q^x; with q^x = -k u_x this is u_t = k u_xx + gamma k u u_x
    k, g = 0.1, -10.0
    sys = build_burgers(BurgersParams(k, g))
    x = np.array([0.7, 0.0, 0.0, -0.2, 0.0, 0.0])
    assert np.isclose(sys.reeb_hamiltonian(x)[1], g * 0.7)
    rates = darboux_hdw_rhs(sys, x)
    assert np.isclose(rates.q_rates[1, 0], 0.2 / k)


def test_coupled_strings_decoupled_limit():
    sys = build_coupled_strings(CoupledStringsParams(0.0, no_coupling()))
    x = np.random.default_rng(3).normal(size=8)
    g = sys.dH(x)
    assert np.allclose(g[:2], 0) and g[6] == 0


def test_coupled_strings_rotation_invariant_H():
    sys = build_coupled_strings(CoupledStringsParams(0.3, cosine_coupling(1.2)))
    x = np.random.default_rng(4).normal(size=8)
    c, s = np.cos(0.7), np.sin(0.7)
    R = np.array([[c, -s], [s, c]])
    y = x.copy()
    for a, b in ((0, 1), (2, 3), (4, 5)):
        y[[a, b]] = R @ x[[a, b]]
    assert np.isclose(sys.H(x), sys.H(y))


def test_oscillator_reeb_hamiltonian():
    sys = build_damped_oscillator(OscillatorParams(0.3))
    assert np.allclose(sys.reeb_hamiltonian(np.random.default_rng(5).normal(size=(4, 3))), 0.3)


def test_analytic_gradients_match_fd():
    from kcontact.chart_calculus import fd_gradient
    for sys in zoo():
        x = np.random.default_rng(6).uniform(-1, 1, size=(5, sys.dim))
        assert np.allclose(sys.dH(x), fd_gradient(sys.hamiltonian.value, x), atol=1e-8)


def test_registry_complete():
    assert set(MODEL_BUILDERS) == {"canonical", "example3", "degenerate-duplicate", "damped-string",
                                   "burgers", "coupled-strings", "oscillator"}


def test_invalid_parameters():
    with pytest.raises(ValueError):
        BurgersParams(diff=0.0)
    with pytest.raises(ValueError):
        build_canonical(0, 1)
    with pytest.raises(ValueError):
        CoupledStringsParams(px_sign=2.0)
    with pytest.raises(LayoutError):
        darboux_hdw_rhs(build_example3(), np.zeros(6))
