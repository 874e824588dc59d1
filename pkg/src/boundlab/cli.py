"""Command-line front end emitting figure-ready CSV/JSON data.

Every run is deterministic: same config, byte-identical output.  Exit codes:
0 success, 1 solver failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import accordion, pendulum, radial
from .bessel import bessel_k0
from .core import Grid, WaveSamples
from .errors import BoundLabError

FMT = "{:.12g}"


def _fmt(x) -> str:
    return FMT.format(float(x))


def _write_rows(path, header: str, rows) -> None:
    with open(path, "w", newline="") as f:
        f.write(header + "\n")
        for row in rows:
            f.write(",".join(_fmt(x) for x in row) + "\n")


class UsageError(Exception):
    pass


DEFAULTS = {
    "pendulum-chart": {
        "kappa_min": -0.1, "kappa_max": 0.5, "alpha_min": 0.0, "alpha_max": 1.0,
        "res_kappa": 50, "res_alpha": 50, "steps_per_period": 1200,
        "g": 9.81, "length": 1.0, "nu": 100.0, "f_amplitude": 0.05,
    },
    "pendulum-threshold": {
        "kappa": -0.01, "alpha_hi": 0.3, "steps_per_period": 4000,
        "g": 9.81, "length": 1.0, "nu": 100.0, "f_amplitude": 0.05,
    },
    "accordion-solve": {
        "v0": 0.3, "periods": 10.0, "phase": 0.0, "window": "rectangular",
        "ramp": 2.0 * math.pi, "target_nodes": 0, "h": 1e-3,
    },
    "accordion-envelope": {
        "v0": 0.2, "periods": 15.0, "phase": 0.0, "window": "rectangular",
        "ramp": 2.0 * math.pi, "h": 1e-3,
    },
    "radial-solve": {
        "kind": "square", "depth": 2.8, "v0": 0.35, "r0": 1.0, "phase": 5.1,
        "eta_lo": -2.79, "eta_hi": -0.01, "h": 1e-3,
    },
    "radial-zero-energy": {
        "kind": "square", "r0": 1.0, "phase": 5.1,
        "depth_lo": 1.0, "depth_hi": 4.0, "h": 1e-3,
    },
    "planar-bunching": {"n_max": 30},
    "planar-k0": {"rho_min": 1e-4, "rho_max": 40.0, "h": 1e-3},
    "fig1": {"v0": 0.3, "periods": 10.0, "phase": 0.0, "window": "rectangular",
             "ramp": 2.0 * math.pi, "h": 1e-3},
    "fig2": {"mode": "zero", "r0": 6.0 * math.pi, "phase": 5.1, "v0": 0.35,
             "depth_lo": 0.01, "depth_hi": 0.12, "eta_positive": 1.0, "h": 1e-3},
    "fig3": {"n_max": 25},
    "fig4": {"rho_min": 1e-3, "rho_max": 12.0, "h": 1e-3},
}

OUT_NAMES = {
    "pendulum-chart": "pendulum_chart.csv",
    "pendulum-threshold": "pendulum_threshold.json",
    "accordion-solve": "accordion_state.json",
    "accordion-envelope": "accordion_envelope.csv",
    "radial-solve": "radial_state.csv",
    "radial-zero-energy": "radial_zero_energy.json",
    "planar-bunching": "planar_bunching.csv",
    "planar-k0": "planar_k0.csv",
    "fig1": "fig1.csv",
    "fig2": "fig2.csv",
    "fig3": "fig3.csv",
    "fig4": "fig4.csv",
}


def _load_config(command: str, path: str | None, overrides) -> dict:
    cfg = dict(DEFAULTS[command])
    pairs = []
    if path:
        with open(path) as f:
            for line in f:
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise UsageError(f"bad config line: {line!r}")
                key, val = line.split("=", 1)
                pairs.append((key.strip(), val.strip()))
    for item in overrides or []:
        if "=" not in item:
            raise UsageError(f"bad --set item: {item!r}")
        key, val = item.split("=", 1)
        pairs.append((key.strip(), val.strip()))
    for key, val in pairs:
        if key not in cfg:
            raise UsageError(f"unknown config key {key!r} for {command}")
        old = cfg[key]
        if isinstance(old, bool):
            cfg[key] = val.lower() in ("1", "true", "yes")
        elif isinstance(old, int):
            cfg[key] = int(val)
        elif isinstance(old, float):
            cfg[key] = float(val)
        else:
            cfg[key] = val
    return cfg


def _accordion_spec(cfg) -> accordion.AccordionPotential:
    width = cfg["periods"] * 2.0 * math.pi
    if cfg["window"] == "rectangular":
        win = accordion.WindowSpec("rectangular", center=0.0, half_width=width / 2.0)
    else:
        win = accordion.WindowSpec("raised_cosine", center=0.0,
                                   half_width=width / 2.0, ramp=cfg["ramp"])
    return accordion.AccordionPotential(cfg["v0"], win, cfg["phase"])


def cmd_pendulum_chart(cfg, out, fmt, physical) -> None:
    if physical:
        p = pendulum.from_physical(cfg["g"], cfg["length"], cfg["nu"], cfg["f_amplitude"])
        print(f"physical point: kappa={_fmt(p.kappa)} alpha={_fmt(p.drive_amplitude)}")
    if not (cfg["kappa_min"] < cfg["kappa_max"] and cfg["alpha_min"] <= cfg["alpha_max"]):
        raise UsageError("bad chart ranges")
    chart = pendulum.stability_chart(
        (cfg["kappa_min"], cfg["kappa_max"]), (cfg["alpha_min"], cfg["alpha_max"]),
        (cfg["res_kappa"], cfg["res_alpha"]), steps_per_period=cfg["steps_per_period"])
    if fmt == "csv":
        chart.write_csv(out)
    else:
        with open(out, "w") as f:
            json.dump({"kappa": list(map(float, chart.kappas)),
                       "alpha": list(map(float, chart.alphas)),
                       "stable": chart.stable.astype(int).tolist()}, f)
    n_stable = int(np.count_nonzero(chart.stable))
    print(f"stable cells: {n_stable}  unstable/marginal cells: {chart.stable.size - n_stable}")


def cmd_pendulum_threshold(cfg, out, fmt, physical) -> None:
    kappa = cfg["kappa"]
    if physical:
        p = pendulum.from_physical(cfg["g"], cfg["length"], cfg["nu"], cfg["f_amplitude"])
        kappa = p.kappa
        print(f"physical point: kappa={_fmt(kappa)} alpha={_fmt(p.drive_amplitude)}")
    alpha_c = pendulum.kapitza_threshold(kappa, cfg["alpha_hi"], cfg["steps_per_period"])
    payload = {"kappa": kappa, "alpha_critical": alpha_c,
               "averaging_estimate": math.sqrt(2.0 * abs(kappa))}
    if fmt == "json":
        with open(out, "w") as f:
            json.dump(payload, f)
    else:
        _write_rows(out, "kappa,alpha_critical,averaging_estimate",
                    [(kappa, alpha_c, payload["averaging_estimate"])])
    print(f"alpha_critical = {_fmt(alpha_c)}")


def cmd_accordion_solve(cfg, out, fmt, physical) -> None:
    spec = _accordion_spec(cfg)
    domain = accordion.accordion_domain(spec, h=cfg["h"])
    v_eff_min = -0.5 * cfg["v0"] ** 2
    res = accordion.shoot_eigenvalue(
        accordion.build_potential(spec), 1.2 * v_eff_min, 0.02 * v_eff_min,
        cfg["target_nodes"], domain, match_point=0.0)
    if fmt == "json":
        res.write_json(out)
    else:
        _write_rows(out, "theta,u",
                    zip(domain.points(), res.wave.values))
    print(f"eta = {_fmt(res.eta)}  nodes = {res.nodes}  match_defect = {_fmt(res.match_defect)}")


def cmd_accordion_envelope(cfg, out, fmt, physical) -> None:
    spec = _accordion_spec(cfg)
    domain = accordion.accordion_domain(spec, h=cfg["h"])
    report = accordion.envelope_compare(spec, domain)
    if fmt == "json":
        with open(out, "w") as f:
            json.dump({"eta_envelope": report.eta_envelope,
                       "eta_full": report.eta_full,
                       "relative_gap": report.relative_gap,
                       "overlap": report.overlap}, f)
    else:
        accordion.write_envelope_csv(report, spec, out)
    print(f"eta_envelope = {_fmt(report.eta_envelope)}  eta_full = {_fmt(report.eta_full)}  "
          f"relative_gap = {_fmt(report.relative_gap)}  overlap = {_fmt(report.overlap)}")


def _radial_potential(cfg) -> radial.RadialPotential3D:
    if cfg["kind"] == "square":
        return radial.square_well(cfg["depth"], cfg["r0"])
    if cfg["kind"] == "accordion":
        return radial.radial_accordion(cfg["v0"], cfg["r0"], cfg["phase"])
    raise UsageError(f"unknown radial potential kind {cfg['kind']!r}")


def cmd_radial_solve(cfg, out, fmt, physical) -> None:
    pot = _radial_potential(cfg)
    res = radial.solve_radial_3d(pot, cfg["eta_lo"], cfg["eta_hi"], h=cfg["h"])
    if fmt == "json":
        res.write_json(out)
    else:
        radial.write_radial_csv(out, res.wave)
    print(f"eta = {_fmt(res.eta)}  nodes = {res.nodes}  match_defect = {_fmt(res.match_defect)}")


def cmd_radial_zero_energy(cfg, out, fmt, physical) -> None:
    if cfg["kind"] == "square":
        family = lambda d: radial.square_well(d, cfg["r0"])
    elif cfg["kind"] == "accordion":
        family = lambda d: radial.radial_accordion(d, cfg["r0"], cfg["phase"])
    else:
        raise UsageError(f"unknown radial potential kind {cfg['kind']!r}")
    z = radial.tune_zero_energy(family, cfg["depth_lo"], cfg["depth_hi"], h=cfg["h"])
    if fmt == "json":
        z.write_json(out)
    else:
        radial.write_radial_csv(out, z.u)
    print(f"tuned_depth = {_fmt(z.tuned_depth)}  tail_flatness = {_fmt(z.tail_flatness)}  "
          f"density_growth_slope = {_fmt(z.density_growth_slope)}")


def cmd_planar_bunching(cfg, out, fmt, physical) -> None:
    series = [radial.bunching_series(m, cfg["n_max"]) for m in (0, 1)]
    if fmt == "json":
        with open(out, "w") as f:
            json.dump([{"m": s.m, "zeros": s.zeros.tolist(), "g": s.g.tolist()}
                       for s in series], f)
    else:
        radial.write_bunching_csv(out, series)
    print(f"g0(1) = {_fmt(series[0].g[0])}  g1(1) = {_fmt(series[1].g[0])}")


def cmd_planar_k0(cfg, out, fmt, physical) -> None:
    grid = Grid.span(cfg["rho_min"], cfg["rho_max"], cfg["h"])
    wave, rep = radial.k0_bound_state(grid)
    if fmt == "json":
        with open(out, "w") as f:
            json.dump({"residual": rep.residual, "norm": rep.norm,
                       "peak_rho": rep.peak_rho,
                       "grid": {"start": grid.start, "step": grid.step,
                                "count": grid.count},
                       "u0": [float(x) for x in wave.values]}, f)
    else:
        _write_rows(out, "rho,u0", zip(grid.points(), wave.values))
    print(f"ode_residual = {_fmt(rep.residual)}  norm = {_fmt(rep.norm)}  "
          f"peak_rho = {_fmt(rep.peak_rho)}")


def cmd_fig1(cfg, out, fmt, physical) -> None:
    spec = _accordion_spec(cfg)
    domain = accordion.accordion_domain(spec, h=cfg["h"])
    report = accordion.envelope_compare(spec, domain)
    th = domain.points()
    v = accordion.build_potential(spec)(th)
    _write_rows(out, "theta,v,v_eff,u_full,envelope",
                zip(th, v, report.v_eff.values, report.full.values,
                    report.envelope.values))
    print(f"rows = {domain.count}  eta_full = {_fmt(report.eta_full)}")


def cmd_fig2(cfg, out, fmt, physical) -> None:
    mode = cfg["mode"]
    r0 = cfg["r0"]
    if mode == "negative":
        pot = radial.radial_accordion(cfg["v0"], r0, cfg["phase"])
        res = radial.solve_radial_3d(pot, -0.6 * cfg["v0"] ** 2, -1e-3, h=cfg["h"])
        wave = res.wave
        print(f"eta = {_fmt(res.eta)}")
    elif mode == "zero":
        z = radial.tune_zero_energy(
            lambda d: radial.radial_accordion(d, r0, cfg["phase"]),
            cfg["depth_lo"], cfg["depth_hi"], h=cfg["h"])
        wave = z.u
        print(f"tuned_depth = {_fmt(z.tuned_depth)}  tail_flatness = {_fmt(z.tail_flatness)}")
    elif mode == "positive":
        pot = radial.radial_accordion(cfg["v0"], r0, cfg["phase"])
        grid = Grid.span(0.0, r0 + 12.0, cfg["h"])
        v = pot(grid.points())
        from .accordion import _propagate_raw
        u = _propagate_raw(cfg["eta_positive"] - v, cfg["h"], 0.0, cfg["h"])
        u = u / np.max(np.abs(u))
        wave = WaveSamples(grid, u)
        print(f"eta = {_fmt(cfg['eta_positive'])}")
    else:
        raise UsageError("mode must be negative, zero or positive")
    r = wave.grid.points()
    u = wave.values
    psi2 = np.empty_like(u)
    nz = r > 0
    psi2[nz] = (u[nz] / r[nz]) ** 2
    if not nz.all():
        psi2[~nz] = (u[1] / wave.grid.step) ** 2
    _write_rows(out, "r,u,|psi|^2", zip(r, u, psi2))


def cmd_fig3(cfg, out, fmt, physical) -> None:
    if cfg["n_max"] < 2:
        raise UsageError("n_max must be >= 2")
    rows = []
    for m in (0, 1):
        s = radial.bunching_series(m, cfg["n_max"])
        for n in range(s.g.size):
            rows.append((m, n + 1, s.zeros[n], s.gaps[n], s.g[n]))
    _write_rows(out, "m,n,j,gap,g", rows)
    print(f"rows = {len(rows)}")


def cmd_fig4(cfg, out, fmt, physical) -> None:
    grid = Grid.span(cfg["rho_min"], cfg["rho_max"], cfg["h"])
    rho = grid.points()
    u0 = np.sqrt(rho / math.pi) * bessel_k0(rho)
    vq = -1.0 / (4.0 * rho * rho)
    _write_rows(out, "rho,u0,VQ", zip(rho, u0, vq))
    sub = Grid.span(max(0.5, cfg["rho_min"]), min(8.0, cfg["rho_max"]), cfg["h"])
    _, rep = radial.k0_bound_state(sub)
    print(f"rows = {grid.count}  ode_residual = {_fmt(rep.residual)}")


COMMANDS = {
    "pendulum-chart": cmd_pendulum_chart,
    "pendulum-threshold": cmd_pendulum_threshold,
    "accordion-solve": cmd_accordion_solve,
    "accordion-envelope": cmd_accordion_envelope,
    "radial-solve": cmd_radial_solve,
    "radial-zero-energy": cmd_radial_zero_energy,
    "planar-bunching": cmd_planar_bunching,
    "planar-k0": cmd_planar_k0,
    "fig1": cmd_fig1,
    "fig2": cmd_fig2,
    "fig3": cmd_fig3,
    "fig4": cmd_fig4,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boundlab",
        description="Driven-pendulum stability charts and bound/localized "
                    "state data generation.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="key = value lines")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        if name.startswith("pendulum"):
            p.add_argument("--physical", action="store_true",
                           help="derive kappa/alpha from g, length, nu, f_amplitude")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.command, args.config, args.set)
        out = args.out or OUT_NAMES[args.command]
        physical = getattr(args, "physical", False)
        COMMANDS[args.command](cfg, out, args.format, physical)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (BoundLabError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
