"""``irsa-sim`` command-line runner.

Each subcommand reads a JSON config, runs one experiment and writes a CSV
(to ``--out`` or stdout). ``--plot`` additionally renders a PNG figure.
Nothing is written unless the whole experiment succeeds.
"""
from __future__ import annotations

import argparse
import io
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .analysis import (
    boundary_2d,
    capacity_region,
    de_threshold,
    de_trace,
    make_dual,
)
from .config import ExperimentConfig, load_config
from .degree_dist import make_distribution, mean_degree
from .errors import IRSAError
from .sic_core import analytic_slot_dist
from .sim_engine import (
    LoadVector,
    NetworkSpec,
    child_seed,
    peak,
    run_simulation,
    sweep_load,
)

log = logging.getLogger("irsa")

SUBCOMMANDS = ("sweep", "region", "delay", "dual-check", "threshold")


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, int):
        return str(x)
    return f"{x:.6g}"


@dataclass
class ExperimentOutput:
    header: list
    rows: list
    notes: dict = field(default_factory=dict)
    figure: object = None
    extra_csv: dict = field(default_factory=dict)

    def to_csv(self, cfg: ExperimentConfig) -> str:
        buf = io.StringIO()
        buf.write(
            f"# irsa-sim {__version__} experiment={cfg.kind} seed={cfg.seed} "
            f"config_hash={cfg.config_hash()}\n"
        )
        buf.write(f"# config={cfg.canonical()}\n")
        for key, value in self.notes.items():
            buf.write(f"# {key}={fmt(value)}\n")
        buf.write(",".join(self.header) + "\n")
        for row in self.rows:
            buf.write(",".join(fmt(v) for v in row) + "\n")
        return buf.getvalue()


def _sweep(cfg, workers, plot):
    spec = cfg.network()
    curve = sweep_load(spec, cfg.direction, cfg.grid, cfg.policy, cfg.frames, cfg.seed, workers, cfg.channel)
    header = ["G_t", "T_total"] + [f"T_{i + 1}" for i in range(spec.k)] + ["ci95"]
    rows = [
        [p.total_load, p.report.total_throughput, *p.report.throughput, p.report.total_ci]
        for p in curve
    ]
    best = peak(curve)
    out = ExperimentOutput(header, rows, {"peak_G": best.total_load, "peak_T": best.report.total_throughput})
    if plot:
        from .plotting import plot_sweep

        per_class = [[p.report.throughput[i] for p in curve] for i in range(spec.k)]
        ci = [p.report.total_ci for p in curve]
        out.figure = plot_sweep(cfg.grid, [r[1] for r in rows], per_class, ci)
    return out


def empirical_t_star(cfg: ExperimentConfig, workers: int = 1):
    """Peak of the simulated throughput curve of the single-class dual network."""
    n = sum(c.population for c in cfg.classes)
    dual = NetworkSpec([n], cfg.frame_size, [make_distribution(cfg.distribution)])
    grid = [g for g in cfg.grid if round(g * cfg.frame_size) <= n]
    best = peak(sweep_load(dual, [1.0], grid, "random", cfg.frames, cfg.seed, workers))
    return best.report.total_throughput, best.total_load


def _region(cfg, workers, plot):
    notes = {}
    t_star = cfg.t_star
    if t_star is None:
        t_star, g_star = empirical_t_star(cfg, workers)
        notes.update(empirical_G_star=g_star)
    spec = NetworkSpec([c.population for c in cfg.classes], cfg.frame_size,
                       [make_distribution(c.distribution or {1: 1.0}) for c in cfg.classes])
    region = capacity_region(spec, t_star)
    notes.update(t_star=t_star, sum_cap=region.sum_cap)
    verts = boundary_2d(region)
    out = ExperimentOutput(["T_1", "T_2"], [list(v) for v in verts], notes)
    if plot:
        from .plotting import plot_region

        out.figure = plot_region(verts, t_star)
    return out


def _delay(cfg, workers, plot):
    spec = cfg.network()
    report = run_simulation(spec, cfg.load(), cfg.policy, cfg.frames, cfg.seed, cfg.channel)
    d = report.delay
    M = spec.frame_size
    rows = [
        [str(i + 1), d.avg[i], d.avg[i] * M, d.worst[i], d.counts[i]]
        for i in range(spec.k)
    ]
    rows.append(["network", d.network_avg, d.network_avg * M, d.network_worst, d.samples])
    notes = {f"T_{i + 1}": t for i, t in enumerate(report.throughput)}
    out = ExperimentOutput(["class", "D_a_frames", "D_a_slots", "D_w_frames", "samples"], rows, notes)
    if plot:
        from .plotting import plot_delay

        out.figure = plot_delay(d.avg, d.worst)
    return out


def _dual_check(cfg, workers, plot):
    spec = cfg.network()
    load = cfg.load()
    dual = make_dual(spec, load)
    dual_spec = NetworkSpec([dual.population], spec.frame_size, [dual.distribution])
    dual_load = LoadVector([dual.load])
    multi_rep = run_simulation(spec, load, cfg.policy, cfg.frames, child_seed(cfg.seed, 0), cfg.channel)
    dual_rep = run_simulation(dual_spec, dual_load, cfg.policy, cfg.frames, child_seed(cfg.seed, 1), cfg.channel)
    L = sum(load.active_counts(spec.frame_size))
    analytic = analytic_slot_dist(L / spec.frame_size, mean_degree(dual.distribution), spec.frame_size, L)
    h_multi, h_dual = multi_rep.slot_histogram, dual_rep.slot_histogram
    tv = h_multi.tv_distance(h_dual)
    rows = [
        ["multi", load.total, multi_rep.total_throughput, multi_rep.total_ci, tv, h_multi.tv_distance(analytic)],
        ["dual", dual.load, dual_rep.total_throughput, dual_rep.total_ci, tv, h_dual.tv_distance(analytic)],
    ]
    header = ["network", "G_t", "T_total", "ci95", "tv_multi_dual", "tv_analytic"]
    out = ExperimentOutput(header, rows, {"dual_distribution": str(dual.distribution)})
    if plot:
        from .plotting import plot_slot_histograms

        out.figure = plot_slot_histograms(
            {"k-class": h_multi.probs, "dual": h_dual.probs, "binomial": analytic.probs}
        )
    return out


def _threshold(cfg, workers, plot):
    d = cfg.threshold_distribution()
    g = de_threshold(d, cfg.tolerance)
    out = ExperimentOutput(
        ["distribution", "mean_degree", "G_star", "tolerance"],
        [[str(d), mean_degree(d), g, cfg.tolerance]],
    )
    if cfg.trace_load is not None:
        trace = de_trace(d, cfg.trace_load)
        out.extra_csv["trace"] = ["iteration,x"] + [f"{i},{x:.6g}" for i, x in enumerate(trace)]
        if plot:
            from .plotting import plot_de_trace

            out.figure = plot_de_trace(trace, cfg.trace_load, g)
    elif plot:
        log.warning("threshold: set trace_load in the config to get a figure")
    return out


RUNNERS = {
    "sweep": _sweep,
    "region": _region,
    "delay": _delay,
    "dual_check": _dual_check,
    "threshold": _threshold,
}


def run_experiment(cfg: ExperimentConfig, workers: int = 1, plot: bool = False) -> ExperimentOutput:
    return RUNNERS[cfg.kind](cfg, workers, plot)


def _write_outputs(cfg, out: ExperimentOutput, out_path, plot_path):
    csv_text = out.to_csv(cfg)
    png = None
    if out.figure is not None and plot_path is not None:
        from .plotting import save

        buf = io.BytesIO()
        save(out.figure, buf)
        png = buf.getvalue()
    extras = {}
    for name, lines in out.extra_csv.items():
        if out_path is None:
            log.warning("%s table needs --out; skipped", name)
            continue
        extras[Path(out_path).with_suffix(f".{name}.csv")] = "\n".join(lines) + "\n"

    if out_path is None:
        sys.stdout.write(csv_text)
    else:
        Path(out_path).write_text(csv_text)
    for path, text in extras.items():
        path.write_text(text)
    if png is not None:
        Path(plot_path).write_bytes(png)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="irsa-sim", description="Multi-class IRSA simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
        p.add_argument("--out", help="CSV output path (default: stdout)")
        p.add_argument(
            "--plot", nargs="?", const="", default=None, metavar="PNG",
            help="also render a figure (default path: --out with .png suffix)",
        )
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    plot_path = None
    if args.plot is not None:
        if args.plot:
            plot_path = args.plot
        elif args.out:
            plot_path = str(Path(args.out).with_suffix(".png"))
        else:
            print("irsa-sim: error: --plot needs a path when --out is not given", file=sys.stderr)
            return 2
    try:
        cfg = load_config(args.config, kind=args.command, seed=args.seed)
        log.info("running %s (config hash %s)", cfg.kind, cfg.config_hash())
        out = run_experiment(cfg, max(1, args.workers), plot_path is not None)
        _write_outputs(cfg, out, args.out, plot_path)
    except (IRSAError, OSError) as exc:
        print(f"irsa-sim: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
