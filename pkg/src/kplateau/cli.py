"""Command line surface.

Subcommands: `check` audits admissibility, `invariants` reports the
topological numbers, `relax-film` minimizes film area at fixed rods,
`solve` runs the full alternating minimization, and `export` writes the
initial geometry without solving. Every subcommand takes a scenario from
either `--config PATH` or `--preset NAME`.

Exit codes: 0 on success, 1 when a constraint or solve fails, 2 on usage
errors (bad flags, missing or invalid config).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import figures
from .config import (
    PRESETS,
    build_elastics,
    build_link,
    build_options,
    load_preset,
    parse_config,
    serialize_config,
)
from .constraints import admissibility, tube_disjointness
from .energy import realize
from .errors import ConfigError, KPlateauError
from .film import init_spanning_mesh, probe_rim_clearance, relax_area
from .io import export_mesh, export_trace
from .rod import tube_mesh
from .solver import solve_kirchhoff_plateau
from .topology import (
    crossing_linking_number,
    gauss_linking_number,
    make_probe_family,
    self_linking,
    spanning_certificate,
    total_twist,
    writhe,
)

__all__ = ["run_cli", "main"]


def _scenario(args):
    if (args.config is None) == (args.preset is None):
        raise ConfigError("exactly one of --config or --preset is required")
    if args.preset is not None:
        cfg = load_preset(args.preset)
    else:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        cfg = parse_config(path.read_text())
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.out is not None:
        cfg = replace(cfg, output_dir=args.out)
    return cfg


def _outdir(cfg) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _probes(curves, rods):
    if len(curves) == 2:
        return make_probe_family(curves[0], rods[0][2], curves[1], rods[1][2])
    return make_probe_family(curves[0], rods[0][2])


def cmd_check(cfg) -> int:
    link = build_link(cfg)
    ed1, ed2 = build_elastics(cfg)
    report = admissibility(link, ed1=ed1, ed2=ed2, energy_bound=cfg.energy_bound, voxel=cfg.voxel)
    for name, ok in report.checks.items():
        print(f"  {name:<16} {'PASS' if ok else 'FAIL'}")
    inv = report.invariants
    print(f"  invariants       Lk12={inv.lk12} n1={inv.self_link1} n2={inv.self_link2}")
    if report.tube_gap is not None:
        print(f"  tube gap         {report.tube_gap:.6g}")
    print(f"  margins          {' '.join(format(m, '.6g') for m in report.margins)}")
    if report.e_loop is not None:
        print(f"  loop energy      {report.e_loop:.6g}")
    print(f"admissible: {'yes' if report.admissible else 'no'}")
    return 0 if report.admissible else 1


def cmd_invariants(cfg) -> int:
    link = build_link(cfg)
    curves = realize(link)
    for i, (fc, rod) in enumerate(zip(curves, link.rods), start=1):
        cs = rod[2]
        wr = writhe(fc)
        tw = total_twist(fc)
        sl = self_linking(fc, cs.radius / 2.0)
        print(f"rod{i}: writhe {wr:+.6f}  twist {tw:+.6f} turns  self-link {sl:+d}")
    if len(curves) == 2:
        gauss = gauss_linking_number(curves[0], curves[1])
        lk = crossing_linking_number(curves[0], curves[1])
        print(f"Lk12 = {lk} (Gauss integral {gauss:+.6f})")
    return 0


def cmd_relax_film(cfg) -> int:
    out = _outdir(cfg)
    link = build_link(cfg)
    curves = realize(link)
    rods = link.rods
    tubes = [(fc, rod[2]) for fc, rod in zip(curves, rods)]
    probes = _probes(curves, rods)
    mesh0 = init_spanning_mesh(tubes, stations=cfg.mesh_stations, rings=cfg.mesh_rings, probes=probes)
    cap = 0.5 * probe_rim_clearance(mesh0, probes)
    if len(tubes) == 2:
        gap = tube_disjointness(curves[0], rods[0][2], curves[1], rods[1][2])
        cap = min(cap, 0.25 * (gap + rods[0][2].radius + rods[1][2].radius))
    res = relax_area(mesh0, tubes, steps=cfg.outer_iters * cfg.film_steps_per_outer, max_step=cap)
    cert = spanning_certificate(res.mesh, probes)
    export_mesh(res.mesh, out / "film.obj")
    rows = "\n".join(f"{i},{a!r}" for i, a in enumerate(res.areas))
    (out / "relax.csv").write_text("step,area\n" + rows + "\n")
    figures.area_history_figure(res.areas, out / "film-area.png")
    figures.configuration_figure(link, res.mesh, out / "configuration.png", curves=curves)
    print(f"film area {res.area:.8f} after {res.iterations} accepted steps (converged: {res.converged})")
    hit = sum(1 for h in cert.hits if h)
    print(f"spanning certificate: {'PASS' if cert.passed else 'FAIL'} ({hit}/{len(cert.hits)} probes hit)")
    print(f"outputs in {out}")
    return 0 if cert.passed else 1


def cmd_solve(cfg) -> int:
    out = _outdir(cfg)
    link = build_link(cfg)
    ed1, ed2 = build_elastics(cfg)
    final, mesh, trace = solve_kirchhoff_plateau(link, ed1, ed2, cfg.sigma, build_options(cfg))
    export_trace(trace, out / "trace.csv")
    export_mesh(mesh, out / "film.obj")
    curves = realize(final)
    for i, (fc, rod) in enumerate(zip(curves, final.rods), start=1):
        export_mesh(tube_mesh(fc, rod[2], 16), out / f"tube{i}.obj")
    figures.trace_figure(trace, out / "trace.png")
    figures.configuration_figure(final, mesh, out / "configuration.png", curves=curves)
    last = trace.rows[-1]
    inv = last.invariants
    print(f"converged: {trace.converged} after {last.iteration} outer iterations")
    print(f"energy {last.energy.e_total:.8g}  penalties {last.penalties:.3g}  film area {last.area:.8g}")
    print(f"invariants Lk12={inv.lk12} n1={inv.self_link1} n2={inv.self_link2}")
    print(f"admissible: {'yes' if last.constraints.admissible else 'no'}")
    print(f"outputs in {out}")
    return 0 if last.constraints.admissible else 1


def cmd_export(cfg) -> int:
    out = _outdir(cfg)
    (out / "scenario.cfg").write_text(serialize_config(cfg))
    link = build_link(cfg)
    curves = realize(link)
    rods = link.rods
    for i, (fc, rod) in enumerate(zip(curves, rods), start=1):
        export_mesh(tube_mesh(fc, rod[2], 16), out / f"tube{i}.obj")
    tubes = [(fc, rod[2]) for fc, rod in zip(curves, rods)]
    probes = _probes(curves, rods)
    mesh0 = init_spanning_mesh(tubes, stations=cfg.mesh_stations, rings=cfg.mesh_rings, probes=probes)
    export_mesh(mesh0, out / "film0.obj")
    figures.configuration_figure(link, mesh0, out / "configuration.png", curves=curves)
    print(f"wrote scenario.cfg, tube OBJs, film0.obj, configuration.png to {out}")
    return 0


_COMMANDS = (
    ("check", cmd_check, "audit admissibility of a scenario"),
    ("invariants", cmd_invariants, "report linking, writhe, twist, self-linking"),
    ("relax-film", cmd_relax_film, "minimize film area with the rods held fixed"),
    ("solve", cmd_solve, "run the full alternating minimization"),
    ("export", cmd_export, "write initial geometry and canonical config"),
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kplateau",
        description="Equilibria of linked elastic loops spanned by an area-minimizing film.",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    for name, func, help_text in _COMMANDS:
        sub = subs.add_parser(name, help=help_text)
        sub.add_argument("--config", metavar="PATH", help="scenario config file")
        sub.add_argument("--preset", choices=PRESETS, help="built-in scenario")
        sub.add_argument("--out", metavar="DIR", help="output directory (overrides config)")
        sub.add_argument("--seed", type=int, metavar="N", help="override the scenario seed")
        sub.set_defaults(func=func)
    return parser


def run_cli(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        cfg = _scenario(args)
        return args.func(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KPlateauError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
