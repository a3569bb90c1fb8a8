"""Static SVG charts over a finished run directory."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .engine import read_segments_csv  # noqa: E402

CHARTS = ("version.svg", "bitrate.svg", "buffer.svg", "bitrate_cdf.svg", "downloadrate_cdf.svg")


class PlotError(ValueError):
    pass


def _read_cdf(path: Path) -> tuple[list[float], list[float]]:
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != ["value", "cum_fraction"]:
                raise PlotError(f"{path}: header must be value,cum_fraction")
            rows = [(float(r["value"]), float(r["cum_fraction"])) for r in reader]
    except OSError as exc:
        raise PlotError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise PlotError(f"{path}: {exc}") from exc
    if not rows:
        raise PlotError(f"{path} has no data rows")
    return [v for v, _ in rows], [f for _, f in rows]


def _load(run_dir: Path):
    seg_path = run_dir / "segments.csv"
    try:
        records = read_segments_csv(seg_path.read_text())
    except OSError as exc:
        raise PlotError(f"cannot read {seg_path}: {exc}") from exc
    except ValueError as exc:
        raise PlotError(f"{seg_path}: {exc}") from exc
    if not records:
        raise PlotError(f"{seg_path} has no segment rows")
    return records, _read_cdf(run_dir / "bitrate_cdf.csv"), _read_cdf(run_dir / "downloadrate_cdf.csv")


def _save(fig, path: Path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _series(xs, ys, xlabel, ylabel, title, path: Path, step=False) -> None:
    fig, ax = plt.subplots(figsize=(8, 3.5))
    if step:
        ax.step(xs, ys, where="post")
    else:
        ax.plot(xs, ys, linewidth=1)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, linewidth=0.3)
    fig.tight_layout()
    _save(fig, path)


def plot_run(run_dir: str | Path, out_dir: str | Path) -> list[Path]:
    run_dir, out_dir = Path(run_dir), Path(out_dir)
    # validate every input before writing anything
    records, (bv, bf), (dv, df) = _load(run_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    seg = [r.seg_index for r in records]
    with plt.rc_context({"svg.hashsalt": "vasrsim", "svg.fonttype": "none"}):
        _series(seg, [r.version for r in records], "segment", "version index", "Requested version", out_dir / CHARTS[0], step=True)
        _series(seg, [r.actual_bitrate_kbps for r in records], "segment", "kbps", "Segment bitrate", out_dir / CHARTS[1])
        _series(seg, [r.buffer_after_s for r in records], "segment", "seconds", "Buffer level", out_dir / CHARTS[2])
        _series(bv, bf, "bitrate (kbps)", "fraction of segments", "Bitrate CDF", out_dir / CHARTS[3], step=True)
        _series(dv, df, "download rate (kbps)", "fraction of segments", "Download rate CDF", out_dir / CHARTS[4], step=True)
    return [out_dir / name for name in CHARTS]
