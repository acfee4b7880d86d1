"""Subcommand implementations. Each writes its files into ``out_dir`` and
returns a small summary mapping of scalar results."""
import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import bragg, outputs
from .config import ESTIMATORS, set_path
from .errors import ConfigError


def _estimator(cfg, block):
    est = ESTIMATORS[block]()
    try:
        est.set_params(**cfg[block])
        return est.fit()
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError) or not _is_validation(exc):
            raise
        raise ConfigError(str(exc), block) from exc


def _is_validation(exc):
    # errors raised by parameter checks, as opposed to numerical failures
    from .errors import DepletionError, EmptyBandError, SingularityError

    return not isinstance(exc, (DepletionError, EmptyBandError, SingularityError))


def _svg(fmt):
    return fmt in ("svg", "both")


def run_fringe(cfg, out_dir, fmt="csv"):
    out_dir = Path(out_dir)
    amp = _estimator(cfg, "opa")
    phases = np.linspace(0.0, 2 * np.pi, cfg["fringe"]["n_phases"])
    paths = []
    for basis in cfg["fringe"]["bases"]:
        amp.set_params(basis=basis)
        curve = amp.fringe(phases)
        rows = zip(phases, curve.n_plus, curve.n_minus, curve.difference, itertools.repeat(basis))
        paths.append(outputs.write_csv(out_dir / f"fringe_{basis}.csv",
                                       ["phase_rad", "n_plus", "n_minus", "difference", "basis"], rows))
    summary = {
        "gain": amp.params_.gain,
        "mean_squeezed_photons": amp.mean_squeezed_photons_,
        "fringe_amplitude": amp.fringe_amplitude_,
        "visibility": amp.visibility_,
        "fringe_sum": amp.photon_totals_["fringe_sum"],
        "three_mbar": amp.photon_totals_["three_mbar"],
    }
    outputs.write_csv(out_dir / "fringe_summary.csv", list(summary), [list(summary.values())])
    if _svg(fmt):
        outputs.plot_fringes(paths, out_dir / "fringe.svg")
    return summary


def run_reflectivity(cfg, out_dir, fmt="csv"):
    out_dir = Path(out_dir)
    mirror = _estimator(cfg, "mirror")
    sp = cfg["spectrum"]
    detunings = np.linspace(sp["detuning_min_hz"], sp["detuning_max_hz"], sp["n_points"])
    spectrum = mirror.spectrum(detunings)
    path = outputs.write_csv(
        out_dir / "spectrum.csv",
        ["detuning_hz", "epsilon", "n_b", "reflectivity", "variant"],
        zip(spectrum.detunings, spectrum.epsilon, spectrum.n_b, spectrum.reflectivity,
            itertools.repeat(spectrum.variant)),
    )
    bandwidth = bragg.reflective_bandwidth(spectrum, sp["threshold"])
    summary = {
        "variant": spectrum.variant,
        "layer_pairs": spectrum.layer_pairs,
        "rescaled_density": mirror.rescaled_density_,
        "peak_reflectivity": float(spectrum.reflectivity.max()),
        "threshold": sp["threshold"],
        "bandwidth_hz": bandwidth,
    }
    outputs.write_csv(out_dir / "bandwidth.csv", list(summary), [list(summary.values())])
    if _svg(fmt):
        outputs.plot_spectrum(path, out_dir / "spectrum.svg")
    return summary


def run_carl(cfg, out_dir, fmt="csv"):
    out_dir = Path(out_dir)
    sim = _estimator(cfg, "carl")
    tr = sim.trace_
    orders = [int(n) for n in tr.momentum_orders]
    header = ["time_s", "intensity", "normalized_intensity", "bunching_abs"]
    header += [f"pop_n{n:+d}" if n else "pop_n0" for n in orders] + ["unbinned"]
    rows = (
        [t, i, ni, b, *pops, u]
        for t, i, ni, b, pops, u in zip(tr.times, tr.intensity, tr.normalized_intensity,
                                        tr.bunching, tr.momentum_populations, tr.unbinned)
    )
    path = outputs.write_csv(out_dir / "trace.csv", header, rows)
    report = cfg["carl_report"]
    crossings = {lvl: tr.crossing_time(lvl) for lvl in report["levels"]}
    outputs.write_csv(
        out_dir / "crossings.csv", ["level", "crossing_time_s"],
        [(lvl, "" if t is None else t) for lvl, t in crossings.items()],
    )
    summary = {"mode": tr.mode, "reference_time_s": tr.reference_time}
    for lvl, t in crossings.items():
        summary[f"t_{lvl:g}_s"] = t
    if report["convergence_check"]:
        ratio, e1, e2 = sim.convergence_ratio(report["convergence_time"])
        outputs.write_csv(out_dir / "convergence.csv", ["dt_s", "error_dt", "error_dt_half", "ratio"],
                          [(sim.params_.dt, e1, e2, ratio)])
        summary["convergence_ratio"] = ratio
    if _svg(fmt):
        outputs.plot_trace(path, out_dir / "trace.svg")
    return summary


def run_scenario(cfg, out_dir, fmt="csv"):
    from .scenario import peak_asymmetry

    out_dir = Path(out_dir)
    sc = _estimator(cfg, "recoil")
    table = sc.correlation_table(tuple(cfg["scenario"]["bases"]))
    outputs.write_csv(
        out_dir / "correlation.csv",
        ["basis", "alice_outcome", "macrostate", "phase_rad", "active_plus", "active_minus",
         "recoil_direction", "net_kick", "drift_velocity_m_s"],
        [(r.basis, r.outcome, r.macrostate, r.phase, r.active_plus, r.active_minus,
          r.recoil_direction, r.net_kick, r.drift_velocity) for r in table],
    )
    spacing = sc.peak_model_.peak_spacing
    span = cfg["scenario"]["velocity_span"] * spacing
    v = np.linspace(-span, span, cfg["scenario"]["n_velocities"])
    profile_rows, peak_rows, asym = [], [], {}
    for phase in cfg["scenario"]["profile_phases"]:
        before, after = sc.profiles(phase)
        for vi, b, a in zip(v, before.profile(v), after.profile(v)):
            profile_rows.append((phase, vi, b, a))
        for n, fb, fa, w in zip(before.orders, before.fractions, after.fractions, after.widths):
            peak_rows.append((phase, n, fb, fa, w))
        asym[phase] = peak_asymmetry(after) - peak_asymmetry(before)
    path = outputs.write_csv(out_dir / "profiles.csv", ["phase_rad", "velocity_m_s", "before", "after"],
                             profile_rows)
    outputs.write_csv(out_dir / "peaks.csv",
                      ["phase_rad", "order", "before_fraction", "after_fraction", "width_m_s"], peak_rows)
    window = sc.coherence_.window
    outputs.write_csv(out_dir / "decoherence.csv", ["rate_per_s", "window_s"], [(sc.coherence_.rate, window)])
    if _svg(fmt):
        outputs.plot_profiles(path, out_dir / "profiles.svg")
    summary = {
        "recoil_velocity_m_s": sc.recoil_velocity_,
        "decoherence_window_s": window,
    }
    for r in table:
        summary[f"recoil_{r.outcome}"] = r.recoil_direction
        summary[f"drift_{r.outcome}_m_s"] = r.drift_velocity
    for phase, a in asym.items():
        summary[f"asymmetry_phase_{phase:g}"] = a
    return summary


RUNNERS = {
    "fringe": run_fringe,
    "reflectivity": run_reflectivity,
    "carl": run_carl,
    "scenario": run_scenario,
}

# scalar reported per sweep point
SWEEP_METRIC = {
    "fringe": "fringe_amplitude",
    "reflectivity": "bandwidth_hz",
    "carl": "t_0.5_s",
    "scenario": "asymmetry_phase_0",
}


def _run_point(args):
    command, cfg, out_dir, fmt = args
    start = time.perf_counter()
    try:
        summary = RUNNERS[command](cfg, out_dir, fmt)
        return {"status": "ok", "summary": summary, "error": "", "seconds": time.perf_counter() - start}
    except Exception as exc:  # recorded per point; the sweep carries on
        return {"status": "failed", "summary": {}, "error": f"{type(exc).__name__}: {exc}",
                "seconds": time.perf_counter() - start}


def sweep_points(cfg):
    axes = cfg["sweep"]["axes"]
    if not axes:
        raise ConfigError("no sweep axes defined", "sweep.axes")
    grid = itertools.product(*[a["values"] for a in axes])
    for values in grid:
        point = cfg
        for axis, value in zip(axes, values):
            point = set_path(point, axis["path"], value)
        yield dict(zip([a["path"] for a in axes], values)), point


def run_sweep(cfg, out_dir, fmt="csv", workers=1):
    """Run the sweep grid, one sub-directory per point; returns (summary, results)."""
    out_dir = Path(out_dir)
    command = cfg["sweep"]["command"]
    points = list(sweep_points(cfg))
    jobs = [(command, p, out_dir / f"point_{k:03d}", fmt) for k, (_, p) in enumerate(points)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_point, jobs))
    else:
        results = [_run_point(j) for j in jobs]

    metric = SWEEP_METRIC[command]
    paths = [a["path"] for a in cfg["sweep"]["axes"]]
    rows = []
    for k, ((values, _), res) in enumerate(zip(points, results)):
        rows.append([f"point_{k:03d}", *[values[p] for p in paths], res["status"],
                     res["summary"].get(metric, ""), res["error"]])
    outputs.write_csv(out_dir / "sweep_summary.csv", ["point", *paths, "status", metric, "error"], rows)

    report = []
    if len(paths) == 1 and all(r["status"] == "ok" for r in results):
        xs = [v[paths[0]] for v, _ in points]
        ys = [r["summary"][metric] for r in results]
        if all(isinstance(x, (int, float)) for x in xs) and all(isinstance(y, (int, float)) for y in ys):
            order = np.argsort(xs, kind="stable")
            ys_sorted = np.array(ys, dtype=float)[order]
            monotone = bool(np.all(np.diff(ys_sorted) >= 0))
            report.append((paths[0], metric, monotone))
            outputs.write_csv(out_dir / "sweep_report.csv", ["axis", "metric", "monotone_nondecreasing"], report)
    failed = sum(r["status"] != "ok" for r in results)
    summary = {"points": len(results), "failed": failed, "metric": metric,
               "monotone": {r[0]: r[2] for r in report}}
    return summary, results
