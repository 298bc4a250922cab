"""Config-driven experiment runner.

Usage: ``statediff <experiment> <config.ini> [--out DIR] [--workers N]``
with experiments occupation | fcurve | estimate-d | maem | em-box | fp |
gen-field.  Every run emits CSV outputs plus a manifest echoing the fully
resolved configuration; identical config and seed reproduce byte-identical
CSV bodies.  Exit codes: 0 success, 2 configuration error, 3 simulation
error.  STATEDIFF_OUT sets the default output directory.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .config import (ExperimentConfig, field_to_text, load_config,
                     model_from_sections, parse_box_numbers, parse_field_1d)
from .errors import ConfigError, StateDiffError
from .io import write_csv, write_manifest


def _out_dir(cfg, override):
    out = override or cfg.out_dir or os.environ.get("STATEDIFF_OUT", ".")
    os.makedirs(out, exist_ok=True)
    return out


def _finish(cfg, out, outputs, extra_meta=None):
    sections = {s: dict(v) for s, v in cfg.sections.items()}
    if extra_meta:
        sections["resolved"] = extra_meta
    path = os.path.join(out, "manifest.json")
    write_manifest(path, cfg.experiment, cfg.seed, sections,
                   [os.path.basename(p) for p in outputs], __version__)
    return outputs + [path]


def _field_rows(field, side=None):
    idx = range(field.n) if side is None else np.flatnonzero(field.side == side)
    return [(field.cx[i], field.cy[i], field.rads[i], int(field.side[i])) for i in idx]


def run_occupation(cfg, out, workers=1):
    from .billiard import two_domain_field
    from .lorentz import occupation_ratio

    sec = "occupation"
    box_nums = parse_box_numbers(cfg.get(sec, "box", "60 30"), 2)
    box = (0.0, 0.0, box_nums[0], box_nums[1])
    r1, phi1 = cfg.get(sec, "r1"), cfg.get(sec, "phi1")
    r2, phi2 = cfg.get(sec, "r2"), cfg.get(sec, "phi2")
    total_time = cfg.get(sec, "total_time")
    batches = cfg.get(sec, "batches", 20)
    sample_dt = cfg.get(sec, "sample_interval", 0.0)
    max_sweeps = cfg.get(sec, "max_sweeps", 100)

    ss = np.random.SeedSequence(cfg.seed)
    s_field = int(ss.generate_state(1, dtype=np.uint32)[0])
    field = two_domain_field(box, r1, phi1, r2, phi2, s_field, max_sweeps=max_sweeps)
    res = occupation_ratio(r1, phi1, r2, phi2, total_time, cfg.seed, box=box,
                           n_batches=batches, sample_dt=sample_dt, field=field)
    meta = {"box": cfg.get(sec, "box", "60 30"), "seed": cfg.seed,
            "phi_left_realized": res.field_phi[0],
            "phi_right_realized": res.field_phi[1],
            "n_events": res.n_events, "n_crossings": res.n_crossings}
    p_occ = os.path.join(out, "occupation.csv")
    write_csv(p_occ,
              ["time_left", "time_right", "ratio", "stderr", "total_time",
               "sampled_ratio", "seed"],
              [(res.time_left, res.time_right, res.ratio, res.stderr,
                res.total_time, res.sampled_ratio, res.seed)], meta)
    p_l = os.path.join(out, "field_left.csv")
    p_r = os.path.join(out, "field_right.csv")
    header = ["cx", "cy", "r", "side"]
    write_csv(p_l, header, _field_rows(field, 0), {"box": cfg.get(sec, "box")})
    write_csv(p_r, header, _field_rows(field, 1), {"box": cfg.get(sec, "box")})
    return _finish(cfg, out, [p_occ, p_l, p_r], {"ratio": res.ratio})


def run_fcurve(cfg, out, workers=1):
    from .lorentz import f_curve

    sec = "fcurve"
    phis = [float(v) for v in cfg.get(sec, "phis", "").replace(",", " ").split()]
    kw = dict(ensemble=cfg.get(sec, "ensemble", 200),
              horizon=cfg.get(sec, "horizon", 2000.0),
              max_sweeps=cfg.get(sec, "max_sweeps", 100))
    per_point = None
    cell = cfg.get(sec, "cell_side", 0.0)
    lag_lo, lag_hi = cfg.get(sec, "lag_lo", 0.0), cfg.get(sec, "lag_hi", 0.0)
    overrides = {}
    if cell:
        overrides["cell_side"] = cell
    if lag_lo and lag_hi:
        overrides["lag_window"] = (lag_lo, lag_hi)
    if overrides:
        per_point = {phi: dict(overrides) for phi in phis}
    rows, monotone = f_curve(phis, r_ref=cfg.get(sec, "r_ref", 0.3),
                             seed=cfg.seed, per_point=per_point,
                             workers=workers, **kw)
    p = os.path.join(out, "fcurve.csv")
    write_csv(p, ["phi", "f", "f_se", "d_hat", "d_se", "r", "cell_side"],
              [(r["phi"], r["f"], r["f_se"], r["d_hat"], r["d_se"], r["r"],
                r["cell_side"]) for r in rows],
              {"seed": cfg.seed, "monotone": monotone})
    return _finish(cfg, out, [p])


def run_estimate_d(cfg, out, workers=1):
    from .lorentz import estimate_D

    sec = "destimate"
    kw = dict(ensemble=cfg.get(sec, "ensemble", 200),
              horizon=cfg.get(sec, "horizon", 2000.0),
              max_sweeps=cfg.get(sec, "max_sweeps", 100))
    if cfg.get(sec, "cell_side", 0.0):
        kw["cell_side"] = cfg.get(sec, "cell_side")
    if cfg.get(sec, "lag_lo", 0.0) and cfg.get(sec, "lag_hi", 0.0):
        kw["lag_window"] = (cfg.get(sec, "lag_lo"), cfg.get(sec, "lag_hi"))
    est = estimate_D(cfg.get(sec, "r"), cfg.get(sec, "phi"), seed=cfg.seed,
                     workers=workers, **kw)
    p = os.path.join(out, "d_estimate.csv")
    write_csv(p, ["r", "phi", "d_hat", "stderr", "t_lo", "t_hi", "ensemble",
                  "cell_side", "horizon", "seed"],
              [(est.r, est.phi, est.d_hat, est.stderr, est.window[0],
                est.window[1], est.ensemble, est.cell_side, est.horizon,
                cfg.seed)], {"seed": cfg.seed})
    return _finish(cfg, out, [p])


def run_maem(cfg, out, workers=1):
    from .sampler import SamplerConfig, run, run_ensemble

    model = model_from_sections(cfg)
    sec = "maem"
    h = cfg.get(sec, "h")
    n_steps = cfg.get(sec, "n_steps")
    n_chains = cfg.get(sec, "n_chains", 1000)
    scheme = cfg.get(sec, "scheme", "maem")
    nb = cfg.get(sec, "bins", 20)
    edges = np.linspace(model.box.lo[0], model.box.hi[0], nb + 1)
    res = run_ensemble(model, h, n_steps, n_chains, cfg.seed, scheme=scheme,
                       edges=edges)
    b = res.bins
    p_bins = os.path.join(out, "bins.csv")
    write_csv(p_bins,
              ["bin_lo", "bin_hi", "density", "density_se", "d_eff",
               "d_eff_se", "counts"],
              [(b.edges[i], b.edges[i + 1], b.density[i], b.density_se[i],
                b.d_eff[i], b.d_eff_se[i], int(b.counts[i]))
               for i in range(nb)],
              {"h": h, "n_steps": n_steps, "n_chains": n_chains,
               "scheme": scheme, "seed": cfg.seed,
               "acceptance_fraction": res.acceptance_fraction,
               "d_field": field_to_text(model.d),
               "rho_eq_field": field_to_text(model.rho_eq)})
    outputs = [p_bins]
    traj_steps = cfg.get(sec, "trajectory_steps", 0)
    if traj_steps:
        stride = cfg.get(sec, "trajectory_stride", 1)
        t = run(model, SamplerConfig(h=h, n_steps=traj_steps, seed=cfg.seed,
                                     scheme=scheme, stride=stride), edges=edges)
        p_traj = os.path.join(out, "trajectory.csv")
        write_csv(p_traj, ["step", "time", "x", "accepted"],
                  [(i * stride, t.times[i], t.positions[i], int(t.accepted[i]))
                   for i in range(t.positions.size)],
                  {"h": h, "stride": stride, "seed": cfg.seed,
                   "acceptance_fraction": t.acceptance_fraction})
        outputs.append(p_traj)
    return _finish(cfg, out, outputs)


def run_em_box(cfg, out, workers=1):
    from .sampler import em_box_occupation

    sec = "embox"
    box = parse_box_numbers(cfg.get(sec, "box", "-5 0 5 5"), 4)
    n_l, n_r = em_box_occupation(cfg.get(sec, "d_left"), cfg.get(sec, "d_right"),
                                 box, cfg.get(sec, "h"),
                                 cfg.get(sec, "n_steps"),
                                 cfg.get(sec, "n_chains", 100), cfg.seed)
    p = os.path.join(out, "occupation.csv")
    write_csv(p, ["steps_left", "steps_right", "ratio", "d_left", "d_right",
                  "h", "seed"],
              [(n_l, n_r, n_r / max(n_l, 1), cfg.get(sec, "d_left"),
                cfg.get(sec, "d_right"), cfg.get(sec, "h"), cfg.seed)],
              {"box": cfg.get(sec, "box", "-5 0 5 5"), "seed": cfg.seed})
    return _finish(cfg, out, [p])


def run_fp(cfg, out, workers=1):
    from .fokker_planck import DensityProfile, Grid1D, evolve, profile_from_field

    model = model_from_sections(cfg)
    sec = "fp"
    m = cfg.get(sec, "cells", 400)
    grid = Grid1D(model.box.lo[0], model.box.hi[0], m)
    rho0_text = cfg.get(sec, "rho0", "eq")
    if rho0_text == "eq":
        rho0 = profile_from_field(model.rho_eq, grid)
    elif rho0_text == "left-half":
        mid = 0.5 * (grid.a + grid.b)
        v = np.where(grid.centers < mid, 1.0, 0.0)
        rho0 = DensityProfile(grid, v / (np.sum(v) * grid.dx))
    else:
        rho0 = profile_from_field(parse_field_1d(rho0_text, model.box), grid)
    res = evolve(model, rho0, cfg.get(sec, "t_end"),
                 cfg.get(sec, "dt", 1e-3), theta=cfg.get(sec, "theta", 1.0))
    p = os.path.join(out, "profile.csv")
    write_csv(p, ["x", "rho"],
              list(zip(grid.centers, res.values)),
              {"cells": m, "t_end": cfg.get(sec, "t_end"),
               "dt": cfg.get(sec, "dt", 1e-3),
               "theta": cfg.get(sec, "theta", 1.0),
               "rho0": rho0_text, "mass": res.mass,
               "d_field": field_to_text(model.d),
               "rho_eq_field": field_to_text(model.rho_eq)})
    return _finish(cfg, out, [p])


def run_gen_field(cfg, out, workers=1):
    from .billiard import generate_field, two_domain_field

    sec = "genfield"
    mode = cfg.get(sec, "mode", "single")
    box = parse_box_numbers(cfg.get(sec, "box"), 4)
    ms = cfg.get(sec, "max_sweeps", 100)
    if mode == "two-domain":
        field = two_domain_field(tuple(box), cfg.get(sec, "r1"),
                                 cfg.get(sec, "phi1"), cfg.get(sec, "r2"),
                                 cfg.get(sec, "phi2"), cfg.seed, max_sweeps=ms)
    elif mode in ("single", "periodic"):
        field = generate_field(tuple(box), cfg.get(sec, "r"),
                               cfg.get(sec, "phi"), cfg.seed,
                               max_sweeps=ms, periodic=(mode == "periodic"))
    else:
        raise ConfigError(f"unknown gen-field mode {mode!r}")
    p = os.path.join(out, "field.csv")
    field.to_csv(p)
    return _finish(cfg, out, [p], {"n_discs": field.n,
                                   "free_fraction": field.free_fraction()})


_RUNNERS = {
    "occupation": run_occupation,
    "fcurve": run_fcurve,
    "estimate-d": run_estimate_d,
    "maem": run_maem,
    "em-box": run_em_box,
    "fp": run_fp,
    "gen-field": run_gen_field,
}


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="statediff",
        description="State-dependent diffusion experiments, config-driven.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _RUNNERS:
        p = sub.add_parser(name)
        p.add_argument("config", help="INI config file")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--workers", type=int, default=1,
                       help="parallel workers over independent ensemble members")
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, args.command)
        out = _out_dir(cfg, args.out)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    try:
        outputs = _RUNNERS[args.command](cfg, out, workers=args.workers)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except StateDiffError as e:
        print(f"simulation error: {e}", file=sys.stderr)
        return 3
    for p in outputs:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
