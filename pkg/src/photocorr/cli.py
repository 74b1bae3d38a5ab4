"""Command-line front end.

Subcommands: analytic, simulate, analyze, fit, noise-budget, sweep.  Every
command reads a JSON config (--config), writes machine-readable tables
(TSV) and reports (JSON) into --out, and is deterministic given its config,
seeds included.  Reports embed the fully resolved config for provenance.

Exit codes: 0 success, 2 validation error, 3 data error, 4 numerical
tolerance error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import analysis, markers, montecarlo, seriesio
from .detection import EfficiencyPair, thin_joint
from .errors import DataError, PhotocorrError, TailToleranceError, ValidationError
from .sources import COHERENT_PAIR, SPLIT_THERMAL, TWIN_BEAM, SourceSpec, source_joint

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DATA = 3
EXIT_TOLERANCE = 4


def _load_config(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ValidationError(f"config: no such file: {path}")
    except json.JSONDecodeError as exc:
        raise DataError(f"config {path}: invalid JSON: {exc}")


def _source_from(cfg) -> SourceSpec:
    try:
        return SourceSpec(
            kind=cfg["source"],
            n_mean=float(cfg["n_mean"]),
            mu=int(cfg.get("mu", 1)),
            tau=float(cfg.get("tau", 0.5)),
        )
    except KeyError as exc:
        raise ValidationError(f"config: missing required key {exc}")


def _eff_from(cfg) -> EfficiencyPair:
    try:
        eta = cfg["eta"]
        return EfficiencyPair(float(eta[0]), float(eta[1]))
    except (KeyError, IndexError, TypeError):
        raise ValidationError("config: 'eta' must be a pair [eta1, eta2]")


def _write_report(out_dir, name, payload, resolved_config):
    payload = dict(payload)
    payload["config"] = resolved_config
    path = Path(out_dir) / name
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")
    return path


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def cmd_analytic(cfg, out_dir, fmt="tsv"):
    """Difference distributions, correlation coefficients, variances, threshold."""
    eff = _eff_from(cfg)
    n_mean = float(cfg.get("n_mean", 1.0))
    mu = int(cfg.get("mu", 1))
    report = {"sources": {}}
    for kind in (TWIN_BEAM, COHERENT_PAIR, SPLIT_THERMAL):
        # one mode pair carries n_mean / mu; the mu-fold convolution restores the total
        dd = markers.difference_analytic(SourceSpec(kind, n_mean / mu, 1), eff)
        if mu > 1:
            dd = markers.multimode_difference(dd, mu)
        seriesio.write_table(
            Path(out_dir) / f"diff_{kind}.tsv", ("d", "p"),
            zip(dd.d_values, dd.probs), fmt,
        )
        if cfg.get("joint", False):
            joint = thin_joint(source_joint(SourceSpec(kind, n_mean)), eff)
            rows = [(n1, n2, joint.probs[n1, n2])
                    for n1 in range(joint.cutoff + 1)
                    for n2 in range(joint.cutoff + 1)]
            seriesio.write_table(Path(out_dir) / f"joint_{kind}.tsv",
                                 ("n1", "n2", "p"), rows, fmt)
        rep = markers.difference_variance(SourceSpec(kind, n_mean, mu), eff)
        report["sources"][kind] = {
            "correlation": markers.correlation_coefficient(SourceSpec(kind, n_mean, mu), eff),
            "sigma2_d": rep.sigma2_d,
            "shot_noise_level": rep.shot_noise_level,
            "below_shot_noise": rep.below_shot_noise,
        }
    thr = markers.variance_threshold(eff)
    report["threshold_n"] = thr if thr is not None else "unbounded"
    _write_report(out_dir, "analytic.json", report, cfg)
    return EXIT_OK


def cmd_sweep(cfg, out_dir, fmt="tsv"):
    """Variance-versus-intensity and variance-versus-efficiency tables."""
    eff = _eff_from(cfg)
    n_grid = cfg.get("n_grid")
    if n_grid is None:
        n_grid = np.linspace(float(cfg.get("n_min", 0.0)), float(cfg.get("n_max", 25.0)),
                             int(cfg.get("n_points", 101))).tolist()
    mu = int(cfg.get("mu", 1))
    rows = []
    for n in n_grid:
        cols = [n]
        for kind in (COHERENT_PAIR, TWIN_BEAM, SPLIT_THERMAL):
            cols.append(markers.difference_variance(SourceSpec(kind, float(n), mu), eff).sigma2_d)
        rows.append(cols)
    seriesio.write_table(Path(out_dir) / "sweep_n.tsv",
                         ("n_mean", "sigma2_coherent", "sigma2_twin_beam", "sigma2_thermal"),
                         rows, fmt)
    eta_grid = cfg.get("eta_grid")
    if eta_grid is None:
        eta_grid = np.linspace(0.05, 1.0, 20).tolist()
    n_ref = float(cfg.get("n_ref", 1.0))
    rows = []
    for eta in eta_grid:
        pair = EfficiencyPair(float(eta), float(eta))
        cols = [eta]
        for kind in (COHERENT_PAIR, TWIN_BEAM, SPLIT_THERMAL):
            cols.append(markers.difference_variance(SourceSpec(kind, n_ref, mu), pair).sigma2_d / n_ref)
        rows.append(cols)
    seriesio.write_table(Path(out_dir) / "sweep_eta.tsv",
                         ("eta", "ratio_coherent", "ratio_twin_beam", "ratio_thermal"),
                         rows, fmt)
    _write_report(out_dir, "sweep.json", {"tables": ["sweep_n.tsv", "sweep_eta.tsv"]}, cfg)
    return EXIT_OK


def cmd_simulate(cfg, out_dir, seed_override=None):
    """Generate a shot series and write it as CSV plus JSON sidecar."""
    src = _source_from(cfg)
    eff = _eff_from(cfg)
    seed = int(cfg.get("seed", 0)) if seed_override is None else seed_override
    sim = montecarlo.SimulationConfig(
        source=src,
        eff=eff,
        shots=int(cfg.get("shots", 10000)),
        seed=seed,
        pump_x=float(cfg.get("pump_x", 0.0)),
        volts=bool(cfg.get("volts", False)),
        conv=tuple(cfg.get("conv", (1.0, 1.0))),
        instrument_noise_var=tuple(cfg.get("instrument_noise_var", (0.0, 0.0))),
    )
    series = montecarlo.sample_series(sim)
    resolved = dict(cfg)
    resolved["seed"] = seed
    seriesio.write_series(series, Path(out_dir) / cfg.get("name", "shots.csv"),
                          extra_meta={"config": resolved})
    return EXIT_OK


def cmd_analyze(cfg, out_dir):
    """Reduce a CSV shot record to correlation, difference and fit statistics."""
    try:
        input_path = cfg["input"]
    except KeyError:
        raise ValidationError("config: missing required key 'input'")
    series, meta = seriesio.read_series(input_path)
    lags = [int(v) for v in cfg.get("lags", (0, 1, 2, 5))]
    gamma = {str(lag): analysis.correlation_function(series, lag) for lag in lags}
    report = {
        "shots": len(series),
        "correlation_function": gamma,
        "correlation_raw": analysis.correlation_function(series, 0),
        "correlation_noise_corrected": analysis.measured_correlation(series),
        "sigma2_difference": analysis.measured_difference_variance(series),
        "difference_histogram": _difference_histogram(series),
        "input_metadata": meta,
    }
    if cfg.get("fit", False):
        c1, c2 = series.counts()
        for name, ch in (("channel1", c1), ("channel2", c2)):
            fit = analysis.fit_multithermal(ch, integer_mu=bool(cfg.get("integer_mu", True)))
            report[f"multithermal_fit_{name}"] = {
                "mu": fit.mu_hat,
                "v_mean": fit.v_mean_hat,
                "chi2_per_bin": fit.goodness,
                "n_clipped": fit.n_clipped,
            }
    _write_report(out_dir, cfg.get("name", "analysis.json"), report, cfg)
    return EXIT_OK


def _difference_histogram(series):
    c1, c2 = series.counts()
    d = c1 - c2
    if series.unit == "counts":
        values, counts = np.unique(d.astype(np.int64), return_counts=True)
        return {str(int(v)): int(c) for v, c in zip(values, counts)}
    q75, q25 = np.percentile(d, [75, 25])
    width = 2.0 * (q75 - q25) * d.size ** (-1.0 / 3.0)
    if width <= 0:
        return {}
    edges = np.arange(d.min(), d.max() + width, width)
    counts, edges = np.histogram(d, bins=edges)
    return {f"{lo:.6g}": int(c) for lo, c in zip(edges[:-1], counts)}


def cmd_fit(cfg, out_dir):
    """Multithermal fit of one channel of a CSV record."""
    try:
        input_path = cfg["input"]
    except KeyError:
        raise ValidationError("config: missing required key 'input'")
    series, _ = seriesio.read_series(input_path)
    channel = int(cfg.get("channel", 1))
    if channel not in (1, 2):
        raise ValidationError(f"channel: must be 1 or 2, got {channel}")
    values = series.counts()[channel - 1]
    fit = analysis.fit_multithermal(values, integer_mu=bool(cfg.get("integer_mu", True)))
    _write_report(out_dir, cfg.get("name", "fit.json"), {
        "channel": channel,
        "mu": fit.mu_hat,
        "v_mean": fit.v_mean_hat,
        "chi2_per_bin": fit.goodness,
        "n_clipped": fit.n_clipped,
    }, cfg)
    return EXIT_OK


def cmd_noise_budget(cfg, out_dir, fmt="tsv"):
    """Pump-noise surface over an efficiency grid plus imbalance interval."""
    try:
        sigma2 = float(cfg["sigma2_measured"])
        m1 = float(cfg["m1"])
        m2 = float(cfg["m2"])
        mu = int(cfg["mu"])
    except KeyError as exc:
        raise ValidationError(f"config: missing required key {exc}")
    kind = cfg.get("source", TWIN_BEAM)
    grid_cfg = cfg.get("eta_grid", {})
    lo = float(grid_cfg.get("lo", 0.4))
    hi = float(grid_cfg.get("hi", 0.95))
    points = int(grid_cfg.get("points", 12))
    eta1_grid = np.linspace(lo, hi, points)
    eta2_grid = np.linspace(lo, hi, points)
    budget = analysis.noise_surface(sigma2, m1, m2, mu, eta1_grid, eta2_grid,
                                    kind=kind, eta_nominal=cfg.get("eta_nominal"))
    rows = []
    for i, a in enumerate(budget.eta1):
        for j, b in enumerate(budget.eta2):
            rows.append((a, b, budget.x[i, j], budget.corrected_sigma2[i, j],
                         budget.shot_noise_plane))
    seriesio.write_table(Path(out_dir) / "noise_surface.tsv",
                         ("eta1", "eta2", "x", "corrected_sigma2", "shot_noise_plane"),
                         rows, fmt)
    eta_nom = cfg.get("eta_nominal", 0.5 * (lo + hi))
    nominal = analysis.solve_pump_noise(sigma2, eta_nom, eta_nom, m1, m2, mu, kind)
    summary = {
        "shot_noise_plane": budget.shot_noise_plane,
        "imbalance_interval": list(budget.imbalance_interval),
        "x_at_nominal": nominal.x,
        "x_at_nominal_at_floor": nominal.at_floor,
        "x_grid_min": float(budget.x.min()),
        "x_grid_max": float(budget.x.max()),
    }
    if "reference_x" in cfg:
        summary["reference_x"] = float(cfg["reference_x"])
    _write_report(out_dir, "noise_budget.json", summary, cfg)
    return EXIT_OK


_COMMANDS = {
    "analytic": cmd_analytic,
    "sweep": cmd_sweep,
    "simulate": cmd_simulate,
    "analyze": cmd_analyze,
    "fit": cmd_fit,
    "noise-budget": cmd_noise_budget,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="photocorr",
        description="Joint photodetection statistics of correlated light beams.",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, help="JSON parameter file")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--format", choices=("tsv", "csv", "json"), default="tsv",
                        help="container for tabular outputs (reports are always JSON)")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.config)
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.command == "simulate":
            return cmd_simulate(cfg, out_dir, seed_override=args.seed)
        if args.seed is not None:
            cfg = dict(cfg, seed=args.seed)
        if args.command in ("analytic", "sweep", "noise-budget"):
            return _COMMANDS[args.command](cfg, out_dir, fmt=args.format)
        return _COMMANDS[args.command](cfg, out_dir)
    except ValidationError as exc:
        print(f"photocorr {args.command}: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except TailToleranceError as exc:
        print(f"photocorr {args.command}: tolerance error: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except DataError as exc:
        print(f"photocorr {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except PhotocorrError as exc:
        print(f"photocorr {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DATA


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
