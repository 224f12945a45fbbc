"""End-to-end acceptance checks, one test (or pair) per criterion.

Each test records a PASS/FAIL line that is repeated in the terminal summary.
"""

import math
import time

import numpy as np

from kcontact.cli import main
from kcontact.core import (
    darboux_kvector,
    hdw_residual_kvector,
    lie_form_residual,
    reeb_commutator_norm,
    residual_no_reeb,
    section_residuals,
    solve_reeb,
    verify_structure,
)
from kcontact.models import (
    BurgersParams,
    CoupledStringsParams,
    DampedStringParams,
    OscillatorParams,
    build_burgers,
    build_canonical,
    build_coupled_strings,
    build_damped_oscillator,
    build_damped_string,
    build_degenerate_duplicate,
    build_example3,
    burgers_shift_v,
    harmonic_coupling,
    string_translation,
    strings_rotation,
)
from kcontact.pde import (
    burgers_dt_limit,
    burgers_oracle,
    heat_fourier_oracle,
    integrate_burgers,
    integrate_coupled_strings,
    integrate_damped_oscillator,
    integrate_damped_string,
    integrate_heat,
    modal_string_oracle,
    observed_orders,
)
from kcontact.section import SpaceGrid
from kcontact.symmetry import (
    check_hamiltonian_symmetry,
    dissipation_residual_scan,
    dynamical_symmetry_probe,
    induced_dissipation_law,
)

SEED = 20240601
STRING = DampedStringParams(rho=1.0, tau=1.0, damp=0.2)
BURGERS = BurgersParams(diff=0.1)  # gamma = -1/k by default
COUPLED = CoupledStringsParams(0.3, harmonic_coupling())


def points(m, n, seed=SEED):
    return np.random.default_rng(seed).uniform(-1.0, 1.0, size=(n, m))


def structure_models():
    out = [build_canonical(n, k) for n in (1, 2) for k in (1, 2, 3)]
    return out + [build_example3(), build_damped_string(STRING), build_burgers(BURGERS),
                  build_coupled_strings(COUPLED)]


def darboux_models():
    return [build_canonical(n, k) for n in (1, 2) for k in (1, 2, 3)] + [
        build_damped_string(STRING), build_burgers(BURGERS), build_coupled_strings(COUPLED),
        build_damped_oscillator(OscillatorParams(0.3))]


def sine(x):
    return np.sin(np.pi * x)


def periodic_sine(x):
    return np.sin(2 * np.pi * x)


def test_criterion_1_structure(acceptance):
    start = time.perf_counter()
    worst_margin, ok = np.inf, True
    for sys in structure_models():
        report = verify_structure(sys, points(sys.dim, 50))
        ok &= report.ok
        worst_margin = min(worst_margin, report.min_retained)
    bad = verify_structure(build_degenerate_duplicate(), points(5, 50))
    negative = "i" in bad.failed_conditions
    elapsed = time.perf_counter() - start
    passed = ok and worst_margin > 1e-6 and negative and elapsed < 5
    acceptance(1, passed, f"min margin {worst_margin:.3g}, duplicate fails (i): {negative}, {elapsed:.2f} s")
    assert passed


def test_criterion_2_reeb(acceptance):
    start = time.perf_counter()
    worst_frame, worst_comm = 0.0, 0.0
    cases = [(sys, list(sys.darboux_layout.s)) for sys in darboux_models()]
    ex3 = build_example3()
    cases.append((ex3, [ex3.coordinate_names.index("s"), ex3.coordinate_names.index("t")]))
    for sys, s_index in cases:
        expected = np.eye(sys.dim)[s_index]
        for x in points(sys.dim, 20):
            worst_frame = max(worst_frame, float(np.abs(solve_reeb(sys, x).vectors - expected).max()))
            worst_comm = max(worst_comm, reeb_commutator_norm(sys, x))
    elapsed = time.perf_counter() - start
    passed = worst_frame < 1e-10 and worst_comm < 1e-6 and elapsed < 5
    acceptance(2, passed, f"frame error {worst_frame:.2e}, commutators {worst_comm:.2e}, {elapsed:.2f} s")
    assert passed


def test_criterion_3_formulation_equivalence(acceptance):
    start = time.perf_counter()
    worst = {"hdw": 0.0, "lie": 0.0, "no_reeb": 0.0}
    for sys in (build_damped_string(STRING), build_coupled_strings(COUPLED)):
        X_fields = [lambda z, a=a: np.apply_along_axis(
            lambda p: darboux_kvector(sys, p, split_energy=True)[a], -1, z) for a in range(sys.k)]
        for x in points(sys.dim, 100):
            X = darboux_kvector(sys, x, split_energy=True)
            r1, r2 = hdw_residual_kvector(sys, X, x)
            worst["hdw"] = max(worst["hdw"], float(np.abs(r1).max()), abs(float(r2)))
            worst["lie"] = max(worst["lie"], float(np.abs(lie_form_residual(sys, X_fields, x)).max()))
            if abs(float(sys.H(x))) > 1e-6:
                n1, n2 = residual_no_reeb(sys, X, x)
                worst["no_reeb"] = max(worst["no_reeb"], float(np.abs(n1).max()), abs(float(n2)))
    elapsed = time.perf_counter() - start
    passed = max(worst.values()) < 1e-9 and elapsed < 5
    detail = ", ".join(f"{k} {v:.2e}" for k, v in worst.items())
    acceptance(3, passed, f"{detail}, {elapsed:.2f} s")
    assert passed


def test_criterion_4_oscillator(acceptance):
    start = time.perf_counter()
    sys = build_damped_oscillator(OscillatorParams(0.3))
    ic = np.array([1.0, 0.5, 0.2])
    traj = integrate_damped_oscillator(sys, ic, 5.0, 1e-3)
    H0 = float(sys.H(ic))
    rel = float(np.abs(sys.H(traj.states) - H0 * np.exp(-0.3 * traj.times)).max() / abs(H0))
    elapsed = time.perf_counter() - start
    passed = rel < 1e-6 and elapsed < 1
    acceptance(4, passed, f"relative H error {rel:.2e}, {elapsed:.2f} s")
    assert passed


def string_error(N, t_end=2.0):
    g = SpaceGrid(0.0, 1.0, N)
    psi = integrate_damped_string(STRING, g, sine, 0.0, t_end, 0.25 * g.dx)
    exact = modal_string_oracle(STRING, 1, psi.times[:, None], psi.x[None, :])
    return float(np.abs(psi.field("u") - exact).max())


def test_criterion_5_damped_string(acceptance):
    start = time.perf_counter()
    errors = [string_error(N) for N in (51, 101, 201)]
    orders = observed_orders(errors)
    elapsed = time.perf_counter() - start
    passed = errors[-1] < 1e-3 and np.all((orders >= 1.7) & (orders <= 2.3)) and elapsed < 30
    acceptance(5, passed, f"error at N=201 {errors[-1]:.2e}, orders {np.round(orders, 3).tolist()}, "
                          f"{elapsed:.2f} s")
    assert passed


def test_criterion_6_burgers_and_heat(acceptance):
    start = time.perf_counter()
    g = SpaceGrid(0.0, 1.0, 256, "periodic")
    psi = integrate_burgers(BURGERS, g, periodic_sine, 0.5, save_every=10 ** 6)
    exact = burgers_oracle(periodic_sine, BURGERS.diff, BURGERS.gamma, 0.5, psi.x)
    err_b = float(np.abs(psi.field("u")[-1] - exact).max())
    heat = integrate_heat(BURGERS.diff, g, periodic_sine, 0.5, save_every=10 ** 6)
    err_h = float(np.abs(heat.field("u")[-1] - heat_fourier_oracle(periodic_sine, 0.1, 0.5, heat.x)).max())
    elapsed = time.perf_counter() - start
    passed = err_b < 5e-3 and err_h < 5e-3 and elapsed < 60
    acceptance(6, passed, f"Cole-Hopf error {err_b:.2e}, heat error {err_h:.2e}, {elapsed:.2f} s")
    assert passed


def burgers_run(N, t_end=0.5, spacing=0.25):
    # stored frames a fixed fraction of dx apart, so the time differences refine with the grid
    g = SpaceGrid(0.0, 1.0, N, "periodic")
    frames = int(round(t_end / (spacing * g.dx)))
    per = math.ceil(t_end / (frames * burgers_dt_limit(BURGERS, g, periodic_sine)))
    return integrate_burgers(BURGERS, g, periodic_sine, t_end, t_end / (frames * per), save_every=per)


def max_section_residual(sys, psi):
    r1, r2 = section_residuals(sys, psi)
    return max(float(np.abs(r1).max()), float(np.abs(r2).max()))


def test_criterion_7_residual_scan(acceptance):
    string_sys, burgers_sys = build_damped_string(STRING), build_burgers(BURGERS)
    s_res = []
    for N in (51, 101, 201):
        g = SpaceGrid(0.0, 1.0, N)
        s_res.append(max_section_residual(string_sys, integrate_damped_string(STRING, g, sine, 0.0, 1.0,
                                                                              0.25 * g.dx)))
    b_res = [max_section_residual(burgers_sys, burgers_run(N)) for N in (65, 129, 257)]
    s_ord, b_ord = observed_orders(s_res), observed_orders(b_res)
    passed = s_ord.min() >= 1.7 and b_ord.min() >= 1.7
    acceptance(7, passed, f"string orders {np.round(s_ord, 3).tolist()}, "
                          f"Burgers orders {np.round(b_ord, 3).tolist()}")
    assert passed


def law_residuals(sys, law, run, levels):
    return [float(np.abs(dissipation_residual_scan(sys, law, run(N))).max()) for N in levels]


def test_criterion_8_dissipation_laws(acceptance):
    levels = (41, 81, 161)
    results = {}
    for damp in (0.2, 0.0):
        params = DampedStringParams(1.0, 1.0, damp)
        sys = build_damped_string(params)
        law = induced_dissipation_law(sys, string_translation())

        def run(N, params=params):
            g = SpaceGrid(0.0, 1.0, N)
            return integrate_damped_string(params, g, sine, 0.0, 1.0, 0.25 * g.dx)

        results[f"string damp={damp:g}"] = observed_orders(law_residuals(sys, law, run, levels))
    for gamma in (0.3, 0.0):
        params = CoupledStringsParams(gamma, harmonic_coupling())
        sys = build_coupled_strings(params)
        law = induced_dissipation_law(sys, strings_rotation())

        def run(N, params=params):
            g = SpaceGrid(0.0, 1.0, N)
            return integrate_coupled_strings(params, g, sine, lambda x: 0.5 * np.sin(2 * np.pi * x), 1.0,
                                             0.25 * g.dx)

        results[f"coupled gamma={gamma:g}"] = observed_orders(law_residuals(sys, law, run, levels))
    passed = all(o.min() >= 1.7 for o in results.values())
    acceptance(8, passed, ", ".join(f"{k} orders {np.round(v, 2).tolist()}" for k, v in results.items()))
    assert passed


def test_criterion_9_hamiltonian_symmetries(acceptance):
    rot = check_hamiltonian_symmetry(build_coupled_strings(COUPLED), strings_rotation(), points(8, 50))
    trans = check_hamiltonian_symmetry(build_damped_string(STRING), string_translation(), points(5, 50))
    shift = check_hamiltonian_symmetry(build_burgers(BURGERS), burgers_shift_v(), points(6, 50))
    worst = max(rot.lie_eta.max(), rot.lie_H, trans.lie_eta.max(), trans.lie_H)
    passed = rot.passed and trans.passed and not shift.passed
    acceptance(9, passed, f"rotation and d/du residual {worst:.2e}; d/dv Hamiltonian check fails: "
                          f"{not shift.passed} (L eta^t = {shift.lie_eta[0]:.3g})")
    assert passed


def test_criterion_9_burgers_shift_transport_probe(acceptance):
    sys = build_burgers(BURGERS)
    g = SpaceGrid(0.0, 1.0, 129, "periodic")
    psi = integrate_burgers(BURGERS, g, periodic_sine, 0.2, save_every=4)
    probe = dynamical_symmetry_probe(sys, burgers_shift_v(), psi, epsilon=0.1, tol=1e-6)
    acceptance(9, probe.passed, f"d/dv transport probe residual {probe.before:.3e} -> {probe.after:.3e} "
                                f"(allowance {probe.allowance:.1e})")
    assert probe.passed


def test_criterion_10_determinism(acceptance, tmp_path):
    runs = [
        ["verify", "--model", "coupled-strings"],
        ["verify", "--model", "example3"],
        ["simulate", "--set", "N=41", "--set", "t_end=0.5", "--set", "residual_scan=true"],
        ["simulate", "--model", "burgers", "--set", "N=64", "--set", "t_end=0.2"],
        ["simulate", "--model", "oscillator"],
        ["convergence", "--model", "oscillator"],
        ["dissipation", "--model", "coupled-strings", "--set", "N=41", "--set", "t_end=0.5"],
        ["symmetry", "--model", "coupled-strings", "--set", "N=41", "--set", "t_end=0.3"],
    ]
    digests = []
    for rep in ("a", "b"):
        files = {}
        for i, args in enumerate(runs):
            out = tmp_path / rep / str(i)
            main([*args, "--seed", "11", "--out", str(out)])
            files.update({f"{i}/{p.name}": p.read_bytes() for p in sorted(out.glob("*.csv"))})
        digests.append(files)
    same = digests[0] == digests[1] and len(digests[0]) >= 12
    acceptance(10, same, f"{len(digests[0])} CSV files byte-identical across repeats: {same}")
    assert same
