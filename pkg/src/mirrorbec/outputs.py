"""CSV writing, SVG rendering and run manifests."""
import csv
import hashlib
import json
import platform
from pathlib import Path

import numpy as np


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_csv(path, header, rows):
    """Write rows with round-trip float formatting, so equal inputs give equal bytes."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    return path


def read_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    return header, rows


def numeric_columns(path, names):
    header, rows = read_csv(path)
    idx = [header.index(n) for n in names]
    return [np.array([float(r[i]) for r in rows]) for i in idx]


def sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


MANIFEST_NAME = "manifest.json"


def versions():
    import matplotlib
    import scipy
    import sklearn
    import yaml

    from . import __version__

    return {
        "mirrorbec": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "scikit-learn": sklearn.__version__,
        "pyyaml": yaml.__version__,
        "matplotlib": matplotlib.__version__,
    }


def write_manifest(out_dir, command, config, timings, extra=None):
    """List every file under ``out_dir`` with its checksum, plus run metadata."""
    out_dir = Path(out_dir)
    files = []
    for f in sorted(p for p in out_dir.rglob("*") if p.is_file()):
        rel = f.relative_to(out_dir).as_posix()
        if rel == MANIFEST_NAME:
            continue
        files.append({"path": rel, "sha256": sha256(f), "bytes": f.stat().st_size})
    manifest = {
        "command": command,
        "config": config,
        "versions": versions(),
        "outputs": files,
        "timings_s": timings,
    }
    if extra:
        manifest.update(extra)
    path = out_dir / MANIFEST_NAME
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=_fmt) + "\n")
    return manifest


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "mirrorbec"
    return plt


def save_svg(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    _pyplot().close(fig)
    return path


def plot_fringes(csv_paths, svg_path):
    plt = _pyplot()
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(6, 6), sharex=True)
    for p in csv_paths:
        header, rows = read_csv(p)
        basis = rows[0][header.index("basis")] if rows else Path(p).stem
        phase, n1, n2, diff = numeric_columns(p, ["phase_rad", "n_plus", "n_minus", "difference"])
        top.plot(phase, n1, label=f"{basis}: first mode")
        top.plot(phase, n2, "--", label=f"{basis}: second mode")
        bottom.plot(phase, diff, label=basis)
    top.set_ylabel("mean photon number")
    top.legend(fontsize="small")
    bottom.set_xlabel("injected phase (rad)")
    bottom.set_ylabel("N(phase)")
    bottom.legend(fontsize="small")
    return save_svg(fig, svg_path)


def plot_spectrum(csv_path, svg_path):
    plt = _pyplot()
    d, r = numeric_columns(csv_path, ["detuning_hz", "reflectivity"])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(d / 1e9, r)
    ax.set_xlabel("detuning (GHz)")
    ax.set_ylabel("reflectivity")
    return save_svg(fig, svg_path)


def plot_trace(csv_path, svg_path):
    plt = _pyplot()
    t, y = numeric_columns(csv_path, ["time_s", "normalized_intensity"])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(t * 1e6, y)
    ax.set_xlabel("time (us)")
    ax.set_ylabel("I(t) / I_ref")
    return save_svg(fig, svg_path)


def plot_profiles(csv_path, svg_path):
    plt = _pyplot()
    phase, v, before, after = numeric_columns(csv_path, ["phase_rad", "velocity_m_s", "before", "after"])
    fig, ax = plt.subplots(figsize=(6, 4))
    for ph in np.unique(phase):
        sel = phase == ph
        ax.plot(v[sel] * 1e3, after[sel], label=f"after, phase {ph:.3g}")
    sel = phase == phase[0]
    ax.plot(v[sel] * 1e3, before[sel], ":", label="before")
    ax.set_xlabel("velocity (mm/s)")
    ax.set_ylabel("population density (s/m)")
    ax.legend(fontsize="small")
    return save_svg(fig, svg_path)
