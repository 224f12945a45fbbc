"""Batch command-line front end.

Usage: ``kcontact {verify,simulate,convergence,dissipation,symmetry} [options]``.

A run is configured by a flat JSON object (``--config``) whose keys are listed
in ``DEFAULTS``; ``--model``, ``--out``, ``--seed``, ``--tol`` and repeated
``--set key=value`` override it. ``KCONTACT_OUT`` overrides the output
directory. Exit codes: 0 all checks passed, 1 a check failed (or a stability
bound was violated), 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import models, pde, symmetry
from .core import contact_hamiltonian_vector_field, reeb_commutator_norm, solve_reeb, verify_structure
from .errors import BlowUpError, KContactError, OracleError, StabilityError, StructureError
from .section import SpaceGrid, format_float

DEFAULTS = {
    "model": "damped-string",
    "n": 1, "k": 2,
    "rho": 1.0, "tau": 1.0, "damp": 0.2,
    "diff": 0.1, "gamma": None,
    "coupling": "harmonic", "coupling_strength": 1.0,
    "x0": 0.0, "x1": 1.0, "N": None, "base_N": None, "dt": None, "t_end": None, "frames": 40,
    "ic": "sine", "mode": 1, "amplitude": 1.0, "center": 0.5, "width": 0.05, "value": 0.0,
    "q2_mode": 2, "q2_amplitude": 0.5,
    "q0": 0.0, "p0": 1.0, "s0": 0.0,
    "points": 50, "seed": 0, "tol": None,
    "symmetry": None, "epsilon": 0.1,
    "residual_scan": False,
    "out": "kcontact-out",
}

SIM_DEFAULTS = {
    "damped-string": {"N": 201, "dt": 2.5e-4, "t_end": 2.0},
    "burgers": {"N": 256, "t_end": 0.5},
    "coupled-strings": {"N": 101, "t_end": 1.0, "gamma": 0.3},
    "oscillator": {"dt": 1e-3, "t_end": 5.0, "gamma": 0.3},
}

DEFAULT_SYMMETRY = {
    "damped-string": "translation",
    "coupled-strings": "rotation",
    "burgers": "shift-v",
    "oscillator": "hamiltonian-flow",
}

SYMMETRIES = {
    ("damped-string", "translation"): (models.string_translation, "hamiltonian-k-contact"),
    ("coupled-strings", "rotation"): (models.strings_rotation, "hamiltonian-k-contact"),
    ("burgers", "shift-v"): (models.burgers_shift_v, "dynamical"),
    ("burgers", "shift-v-compensated"): (models.burgers_shift_v_compensated, "hamiltonian-k-contact"),
    ("burgers", "scaling-u"): (models.burgers_scaling_u, "unknown"),
}


class ConfigError(Exception):
    """Malformed or inconsistent run configuration (exit code 2)."""


@dataclass
class RunReport:
    command: str
    model: str
    checks: list = field(default_factory=list)  # (name, status, worst, tol)
    files: list = field(default_factory=list)
    wall_time: float = 0.0

    def add(self, name, passed, worst, tol):
        self.checks.append((name, "pass" if passed else "fail", float(worst), float(tol)))

    @property
    def status(self):
        return "pass" if all(c[1] == "pass" for c in self.checks) else "fail"

    def write(self, out):
        path = out / "report.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["check", "status", "worst", "tol"])
            for name, status, worst, tol in self.checks:
                w.writerow([name, status, format_float(worst), format_float(tol)])
        self.files.append(str(path))

    def summary(self):
        lines = [f"{self.command} {self.model}: {self.status.upper()}"]
        for name, status, worst, tol in self.checks:
            lines.append(f"  {status:4s} {name}: worst={worst:.3e} tol={tol:.3e}")
        for f in self.files:
            lines.append(f"  wrote {f}")
        lines.append(f"  wall time {self.wall_time:.2f} s")
        return "\n".join(lines)


# -- configuration ---------------------------------------------------------------------


def _coerce(key, raw):
    """Parse a ``--set`` value with the type of its default."""
    default = DEFAULTS[key]
    if isinstance(default, bool):
        if raw.lower() in ("1", "true", "yes"):
            return True
        if raw.lower() in ("0", "false", "no"):
            return False
        raise ConfigError(f"{key} expects a boolean, got {raw!r}")
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float) or default is None:
        try:
            return float(raw)
        except ValueError:
            return raw
    return raw


def load_config(args):
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config must be a flat JSON object")
        cfg.update(_checked(loaded))
    overrides = {}
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, raw = item.split("=", 1)
        if key not in DEFAULTS:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            overrides[key] = _coerce(key, raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {raw!r}") from exc
    cfg.update(overrides)
    for key in ("model", "seed", "tol"):
        if getattr(args, key) is not None:
            cfg[key] = getattr(args, key)
    if args.out is not None:
        cfg["out"] = args.out
    if os.environ.get("KCONTACT_OUT"):
        cfg["out"] = os.environ["KCONTACT_OUT"]
    for key, value in SIM_DEFAULTS.get(cfg["model"], {}).items():
        if cfg.get(key) is None:
            cfg[key] = value
    if cfg["model"] not in models.MODEL_BUILDERS:
        raise ConfigError(f"unknown model {cfg['model']!r}; choose from {sorted(models.MODEL_BUILDERS)}")
    if cfg["tol"] is not None and not cfg["tol"] > 0:
        raise ConfigError("tolerances must be positive")
    if int(cfg["points"]) < 1:
        raise ConfigError("points must be >= 1")
    return cfg


def _checked(loaded):
    unknown = sorted(set(loaded) - set(DEFAULTS))
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    return loaded


def _number(cfg, key, positive=False):
    try:
        value = float(cfg[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key} must be a number, got {cfg[key]!r}") from exc
    if positive and not value > 0:
        raise ConfigError(f"{key} must be positive")
    return value


def _coupling(cfg):
    strength = _number(cfg, "coupling_strength")
    table = {
        "none": models.no_coupling,
        "harmonic": lambda: models.harmonic_coupling(strength),
        "cosine": lambda: models.cosine_coupling(strength),
    }
    if cfg["coupling"] not in table:
        raise ConfigError(f"unknown coupling {cfg['coupling']!r}; choose from {sorted(table)}")
    return table[cfg["coupling"]]()


def build_system(cfg):
    """The model instance and its parameter object."""
    name = cfg["model"]
    try:
        if name == "canonical":
            return models.build_canonical(int(cfg["n"]), int(cfg["k"])), None
        if name in ("example3", "degenerate-duplicate"):
            return models.MODEL_BUILDERS[name](), None
        if name == "damped-string":
            p = models.DampedStringParams(_number(cfg, "rho"), _number(cfg, "tau"), _number(cfg, "damp"))
            return models.build_damped_string(p), p
        if name == "burgers":
            gamma = None if cfg["gamma"] is None else _number(cfg, "gamma")
            p = models.BurgersParams(_number(cfg, "diff"), gamma)
            return models.build_burgers(p), p
        if name == "coupled-strings":
            p = models.CoupledStringsParams(_number(cfg, "gamma"), _coupling(cfg))
            return models.build_coupled_strings(p), p
        if name == "oscillator":
            p = models.OscillatorParams(_number(cfg, "gamma"))
            return models.build_damped_oscillator(p), p
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown model {name!r}")


def _grid(cfg, boundary, N=None):
    try:
        return SpaceGrid(_number(cfg, "x0"), _number(cfg, "x1"), int(N or cfg["N"]), boundary)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def initial_profile(cfg, boundary, prefix=""):
    """Named initial profile: ``sine`` (mode n), ``gaussian`` or ``constant``."""
    kind = cfg["ic"] if not prefix else "sine"
    x0, x1 = _number(cfg, "x0"), _number(cfg, "x1")
    length = x1 - x0
    amp = _number(cfg, prefix + "amplitude")
    if kind == "sine":
        mode = int(cfg[prefix + "mode"])
        factor = 2.0 if boundary == "periodic" else 1.0
        return lambda x: amp * np.sin(factor * mode * math.pi * (x - x0) / length)
    if kind == "gaussian":
        c, w = _number(cfg, "center"), _number(cfg, "width", positive=True)
        return lambda x: amp * np.exp(-(((x - c) / w) ** 2))
    if kind == "constant":
        value = _number(cfg, "value")
        return lambda x: np.full_like(np.asarray(x, dtype=float), value)
    raise ConfigError(f"unknown initial condition {kind!r}; choose sine, gaussian or constant")


def _steps(t_end, dt_limit, dt, frames):
    """Step size and save interval so that stored frames are uniform and end at ``t_end``."""
    if frames < 1:
        raise ConfigError("frames must be >= 1")
    if dt is None:
        per_frame = math.ceil(t_end / (frames * dt_limit) * (1 - 1e-12))
        return t_end / (frames * per_frame), per_frame
    nsteps = int(round(t_end / dt))
    if nsteps < 1 or abs(nsteps * dt - t_end) > 1e-9 * t_end:
        raise ConfigError(f"t_end={t_end} is not a whole number of steps dt={dt}")
    for d in range(max(1, nsteps // frames), nsteps + 1):
        if nsteps % d == 0 and nsteps // d <= frames:
            return dt, d
    return dt, nsteps


def simulate_model(cfg, sys_, params, N=None, frames=None, dt=None):
    name = cfg["model"]
    t_end = _number(cfg, "t_end", positive=True)
    frames = int(frames or cfg["frames"])
    dt = dt if dt is not None else (None if cfg["dt"] is None else _number(cfg, "dt", positive=True))
    if name == "damped-string":
        g = _grid(cfg, "dirichlet-zero", N)
        dt, every = _steps(t_end, pde.string_dt_limit(params, g), dt, frames)
        return pde.integrate_damped_string(params, g, initial_profile(cfg, g.boundary), 0.0, t_end, dt, every)
    if name == "burgers":
        g = _grid(cfg, "periodic", N)
        u0 = initial_profile(cfg, g.boundary)
        dt, every = _steps(t_end, pde.burgers_dt_limit(params, g, u0), dt, frames)
        return pde.integrate_burgers(params, g, u0, t_end, dt, every)
    if name == "coupled-strings":
        g = _grid(cfg, "dirichlet-zero", N)
        dt, every = _steps(t_end, pde.coupled_dt_limit(g), dt, frames)
        return pde.integrate_coupled_strings(
            params, g, initial_profile(cfg, g.boundary), initial_profile(cfg, g.boundary, "q2_"),
            t_end, dt, every)
    if name == "oscillator":
        dt = dt or _number(cfg, "dt", positive=True)
        _, every = _steps(t_end, dt, dt, frames)
        ic = [_number(cfg, "q0"), _number(cfg, "p0"), _number(cfg, "s0")]
        return pde.integrate_damped_oscillator(sys_, ic, t_end, dt, every)
    raise ConfigError(f"model {name!r} cannot be simulated")


# -- commands ---------------------------------------------------------------------------


def _tol(cfg, default):
    return default if cfg["tol"] is None else float(cfg["tol"])


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format_float(v) if isinstance(v, float) else v for v in row])
    return str(path)


def cmd_verify(cfg, out):
    sys_, _ = build_system(cfg)
    report = RunReport("verify", cfg["model"])
    rng = np.random.default_rng(int(cfg["seed"]))
    pts = rng.uniform(-1.0, 1.0, size=(int(cfg["points"]), sys_.dim))
    tol = _tol(cfg, 1e-9)
    st = verify_structure(sys_, pts, tol)
    rows = [(r["point"], r["rank_cc"], r["dim_dr"], r["dim_intersection"]) for r in st.rows()]
    report.files.append(_write_rows(out / "structure.csv",
                                    ["point", "rank_cc", "dim_dr", "dim_intersection"], rows))
    for cond in ("i", "ii", "iii"):
        report.add(f"condition ({cond})", st.passes[cond], 0.0 if st.passes[cond] else 1.0, tol)
    report.add("margin", st.min_retained > 1e-6, st.min_retained, 1e-6)
    if st.ok:
        reeb_rows, worst_res, worst_comm = [], 0.0, 0.0
        for i, p in enumerate(pts):
            frame = solve_reeb(sys_, p)
            worst_res = max(worst_res, frame.residual)
            worst_comm = max(worst_comm, reeb_commutator_norm(sys_, p))
            for a, vec in enumerate(frame.vectors):
                reeb_rows.append((i, a, *[float(v) for v in vec]))
        report.files.append(_write_rows(out / "reeb.csv", ["point", "alpha", *sys_.coordinate_names],
                                        reeb_rows))
        report.add("reeb residual", worst_res < 1e-10, worst_res, 1e-10)
        report.add("reeb commutators", worst_comm < 1e-6, worst_comm, 1e-6)
    else:
        print(f"structure fails condition(s): {', '.join(st.failed_conditions)}")
    return report


def _section_or_trajectory_csv(result, path):
    with open(path, "w", newline="") as fh:
        result.write_csv(fh)
    return str(path)


def cmd_simulate(cfg, out):
    sys_, params = build_system(cfg)
    report = RunReport("simulate", cfg["model"])
    result = simulate_model(cfg, sys_, params)
    name = "trajectory.csv" if cfg["model"] == "oscillator" else "section.csv"
    report.files.append(_section_or_trajectory_csv(result, out / name))
    if cfg["model"] == "oscillator":
        H = sys_.H(result.states)
        ok = bool(np.all(np.isfinite(H)))
        report.add("finite trajectory", ok, float(np.abs(H).max()), np.inf)
    else:
        report.add("finite section", True, float(np.abs(result.data).max()), np.inf)
        if cfg["residual_scan"]:
            scan = pde.residual_scan(sys_, result)
            report.files.append(_write_rows(out / "residual.csv", ["statistic", "r1", "r2"], [
                ("max", scan.max_r1, scan.max_r2), ("mean", scan.mean_r1, scan.mean_r2)]))
            report.add("residual scan (informational)", True, scan.max, np.inf)
    return report


def _oscillator_exact_H(sys_, params, ic, t):
    return float(sys_.H(np.asarray(ic))) * np.exp(-params.gamma * t)


def cmd_convergence(cfg, out):
    sys_, params = build_system(cfg)
    name = cfg["model"]
    report = RunReport("convergence", name)
    rows, errors = [], []
    if name == "damped-string":
        base = int(cfg["base_N"] or 51)
        t_end = _number(cfg, "t_end", positive=True)
        for level in range(3):
            N = (base - 1) * 2 ** level + 1
            g = _grid(cfg, "dirichlet-zero", N)
            dt = pde.fit_step(t_end, 0.25 * g.dx / params.c)
            psi = simulate_model(cfg, sys_, params, N=N, dt=dt)
            exact = pde.modal_string_oracle(params, int(cfg["mode"]), psi.times[:, None], psi.x[None, :],
                                            g.x0, g.length) * _number(cfg, "amplitude")
            if cfg["ic"] != "sine":
                raise ConfigError("the modal oracle needs a sine initial condition")
            errors.append(float(np.abs(psi.field("u") - exact).max()))
            rows.append((N, dt, errors[-1]))
        expected = 2.0
    elif name == "burgers":
        base = int(cfg["base_N"] or 65)
        t_end = _number(cfg, "t_end", positive=True)
        for level in range(3):
            N = (base - 1) * 2 ** level + 1
            g = _grid(cfg, "periodic", N)
            psi = simulate_model(cfg, sys_, params, N=N)
            u0 = initial_profile(cfg, "periodic")
            try:
                exact = pde.burgers_oracle(u0, params.diff, params.gamma, t_end, psi.x, g.x0, g.x1)
            except OracleError as exc:
                raise ConfigError(f"oracle unavailable: {exc}") from exc
            errors.append(float(np.abs(psi.field("u")[-1] - exact).max()))
            rows.append((N, float(psi.meta["dt"]), errors[-1]))
        expected = 2.0
    elif name == "oscillator":
        t_end = _number(cfg, "t_end", positive=True)
        ic = [_number(cfg, "q0"), _number(cfg, "p0"), _number(cfg, "s0")]
        for dt in (0.1, 0.05, 0.025):
            traj = pde.integrate_damped_oscillator(sys_, ic, t_end, dt)
            exact = _oscillator_exact_H(sys_, params, ic, traj.times)
            errors.append(float(np.abs(sys_.H(traj.states) - exact).max()))
            rows.append((0, dt, errors[-1]))
        expected = 4.0
    else:
        raise ConfigError(f"oracle unavailable for model {name!r}")
    orders = pde.observed_orders(errors)
    table = [(N, dt, e, float(orders[i - 1]) if i else "") for i, (N, dt, e) in enumerate(rows)]
    report.files.append(_write_rows(out / "convergence.csv", ["N", "dt", "error", "order"], table))
    lo, hi = 0.85 * expected, 1.15 * expected
    for i, o in enumerate(orders):
        report.add(f"order level {i + 1} in [{lo:g}, {hi:g}]", lo <= o <= hi, float(o), expected)
    return report


def _symmetry(cfg):
    model = cfg["model"]
    name = cfg["symmetry"] or DEFAULT_SYMMETRY.get(model)
    if (model, name) not in SYMMETRIES:
        known = sorted(n for m, n in SYMMETRIES if m == model)
        raise ConfigError(f"no symmetry {name!r} for model {model!r}; known: {known}")
    factory, kind = SYMMETRIES[(model, name)]
    return symmetry.SymmetryCandidate(factory(), kind, name)


def cmd_dissipation(cfg, out):
    sys_, params = build_system(cfg)
    name = cfg["model"]
    report = RunReport("dissipation", name)
    if name == "oscillator":
        tol = _tol(cfg, 1e-6)
        ic = [_number(cfg, "q0"), _number(cfg, "p0"), _number(cfg, "s0")]
        traj = simulate_model(cfg, sys_, params)
        XH = lambda x: contact_hamiltonian_vector_field(sys_, x)
        law = symmetry.induced_dissipation_law(sys_, symmetry.SymmetryCandidate(XH, "dynamical", "X_H"))
        res = symmetry.dissipation_residual_kvector(sys_, law, [XH], traj.states)
        H = sys_.H(traj.states)
        exact = _oscillator_exact_H(sys_, params, ic, traj.times)
        rel = np.abs(H - exact) / abs(exact[0])
        report.files.append(_write_rows(out / "dissipation.csv", ["t", "residual", "H", "H_exact"], [
            (float(t), float(r), float(h), float(e)) for t, r, h, e in zip(traj.times, res, H, exact)]))
        report.add("law residual", np.abs(res).max() < tol, np.abs(res).max(), tol)
        report.add("H decay vs closed form", rel.max() < tol, rel.max(), tol)
        return report
    Y = _symmetry(cfg)
    law = symmetry.induced_dissipation_law(sys_, Y)
    tol = _tol(cfg, 1e-6)
    N, frames = int(cfg["N"]), int(cfg["frames"])
    if frames % 2 or N % 2 == 0 and cfg["model"] != "burgers":
        raise ConfigError("dissipation needs an even frame count (and odd N for Dirichlet grids)")
    fine = simulate_model(cfg, sys_, params)
    # both spacings doubled, so the residual should drop by about 4 from coarse to fine
    coarse = simulate_model(cfg, sys_, params, N=(N - 1) // 2 + 1, frames=frames // 2)
    res = symmetry.dissipation_residual_scan(sys_, law, fine)
    res_coarse = symmetry.dissipation_residual_scan(sys_, law, coarse)
    # expected residual at the fine grid for a second-order scheme, with 50% slack
    estimate = 1.5 * np.abs(res_coarse).max() / 4.0
    tt, xx = np.meshgrid(fine.times[1:-1], fine.x[1:-1], indexing="ij")
    report.files.append(_write_rows(out / "dissipation.csv", ["t", "x", "residual"], [
        (float(t), float(x), float(r)) for t, x, r in zip(tt.ravel(), xx.ravel(), res.ravel())]))
    worst = float(np.abs(res).max())
    report.add(f"law from {Y.name}", worst <= tol + estimate, worst, tol + estimate)
    return report


def cmd_symmetry(cfg, out):
    sys_, params = build_system(cfg)
    Y = _symmetry(cfg)
    report = RunReport("symmetry", cfg["model"])
    tol = _tol(cfg, 1e-6)
    rng = np.random.default_rng(int(cfg["seed"]))
    pts = rng.uniform(-1.0, 1.0, size=(int(cfg["points"]), sys_.dim))
    ham = symmetry.check_hamiltonian_symmetry(sys_, Y, pts, tol=tol)
    reeb = symmetry.check_reeb_preservation(sys_, Y, pts, tol=tol)
    psi = simulate_model(cfg, sys_, params)
    probe = symmetry.dynamical_symmetry_probe(sys_, Y, psi, _number(cfg, "epsilon", positive=True), tol)
    rows = [(n, v) for n, v in ham.rows()]
    rows += [("reeb_bracket", reeb.max_bracket), ("probe_before", probe.before),
             ("probe_after", probe.after), ("probe_allowance", probe.allowance)]
    report.files.append(_write_rows(out / "symmetry.csv", ["quantity", "value"],
                                    [(n, float(v)) for n, v in rows]))
    worst_ham = max(float(ham.lie_eta.max()), ham.lie_H)
    print(f"claimed kind: {Y.kind}; Hamiltonian check {'passes' if ham.passed else 'fails'}, "
          f"transport probe {'passes' if probe.passed else 'fails'}")
    print(f"note: {probe.caveat}")
    if Y.kind == "hamiltonian-k-contact":
        report.add("hamiltonian k-contact", ham.passed, worst_ham, tol)
        report.add("reeb preservation", reeb.passed, reeb.max_bracket, tol)
    if Y.kind in ("hamiltonian-k-contact", "dynamical"):
        report.add("dynamical transport probe", probe.passed, probe.growth, probe.allowance)
    else:
        report.add("classification (informational)", True, worst_ham, tol)
    return report


COMMANDS = {
    "verify": cmd_verify,
    "simulate": cmd_simulate,
    "convergence": cmd_convergence,
    "dissipation": cmd_dissipation,
    "symmetry": cmd_symmetry,
}


def make_parser():
    parser = argparse.ArgumentParser(prog="kcontact", description="k-contact field theory toolkit")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="flat JSON config file")
    parser.add_argument("--model", help=f"one of {sorted(models.MODEL_BUILDERS)}")
    parser.add_argument("--out", help="output directory (KCONTACT_OUT overrides)")
    parser.add_argument("--seed", type=int, help="seed for sampled points")
    parser.add_argument("--tol", type=float, help="check tolerance")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
    return parser


def main(argv=None):
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    start = time.perf_counter()
    try:
        cfg = load_config(args)
        out = Path(cfg["out"])
        out.mkdir(parents=True, exist_ok=True)
        report = COMMANDS[args.command](cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (StabilityError, BlowUpError) as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 1
    except StructureError as exc:
        print(f"structure failure: {exc}", file=sys.stderr)
        return 1
    except (KContactError, ValueError, TypeError, KeyError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    report.wall_time = time.perf_counter() - start
    report.write(out)
    print(report.summary())
    return 0 if report.status == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())
