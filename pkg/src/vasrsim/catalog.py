"""VBR video catalog: the version ladder and per-segment bitrates.

A catalog plays the role of the DASH manifest. Each version carries its
declared average bitrate and the actual bitrate of every segment; segment
sizes follow from bitrate times segment duration.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

AVG_TOLERANCE = 0.01


class CatalogError(ValueError):
    """Raised when a catalog file cannot be parsed or is inconsistent."""


@dataclass(frozen=True)
class Version:
    index: int
    qp: int
    avg_bitrate_kbps: float
    segment_bitrates_kbps: tuple[float, ...]


@dataclass(frozen=True)
class VideoCatalog:
    segment_duration_s: float
    versions: tuple[Version, ...]

    def __post_init__(self):
        _validate(self)

    @property
    def num_segments(self) -> int:
        return len(self.versions[0].segment_bitrates_kbps)

    @property
    def top_index(self) -> int:
        """Highest version index (L)."""
        return len(self.versions) - 1

    @property
    def averages_kbps(self) -> tuple[float, ...]:
        return tuple(v.avg_bitrate_kbps for v in self.versions)

    def bitrate(self, version: int, seg: int) -> float:
        return self.versions[version].segment_bitrates_kbps[seg]


def _validate(cat: VideoCatalog) -> None:
    if not (cat.segment_duration_s > 0 and math.isfinite(cat.segment_duration_s)):
        raise CatalogError(f"segment_duration_s must be positive, got {cat.segment_duration_s}")
    if not cat.versions:
        raise CatalogError("catalog has no versions")
    n = len(cat.versions[0].segment_bitrates_kbps)
    if n < 1:
        raise CatalogError("version 0 has no segments")
    prev_avg = -math.inf
    for pos, v in enumerate(cat.versions):
        if v.index != pos:
            raise CatalogError(f"version at position {pos} declares index {v.index}")
        if len(v.segment_bitrates_kbps) != n:
            raise CatalogError(
                f"version {v.index} has {len(v.segment_bitrates_kbps)} segments, expected {n}"
            )
        for seg, rate in enumerate(v.segment_bitrates_kbps):
            if not (rate > 0 and math.isfinite(rate)):
                raise CatalogError(f"version {v.index} segment {seg}: bitrate must be > 0, got {rate}")
        if not v.avg_bitrate_kbps > prev_avg:
            raise CatalogError(
                f"version {v.index}: average {v.avg_bitrate_kbps} kbps is not above the previous version"
            )
        prev_avg = v.avg_bitrate_kbps
        mean = math.fsum(v.segment_bitrates_kbps) / n
        if abs(mean - v.avg_bitrate_kbps) > AVG_TOLERANCE * v.avg_bitrate_kbps:
            raise CatalogError(
                f"version {v.index}: declared average {v.avg_bitrate_kbps} kbps differs from "
                f"segment mean {mean:.3f} kbps by more than {AVG_TOLERANCE:.0%}"
            )


def segment_size_kbits(catalog: VideoCatalog, version: int, seg: int) -> float:
    if not 0 <= version < len(catalog.versions):
        raise IndexError(f"version {version} out of range [0, {catalog.top_index}]")
    if not 0 <= seg < catalog.num_segments:
        raise IndexError(f"segment {seg} out of range [0, {catalog.num_segments - 1}]")
    return catalog.bitrate(version, seg) * catalog.segment_duration_s


def catalog_from_dict(doc: dict) -> VideoCatalog:
    try:
        versions = tuple(
            Version(
                index=int(v["index"]),
                qp=int(v["qp"]),
                avg_bitrate_kbps=float(v["avg_bitrate_kbps"]),
                segment_bitrates_kbps=tuple(float(x) for x in v["segment_bitrates_kbps"]),
            )
            for v in doc["versions"]
        )
        duration = float(doc["segment_duration_s"])
    except (KeyError, TypeError, ValueError) as exc:
        raise CatalogError(f"malformed catalog: {exc!r}") from exc
    return VideoCatalog(segment_duration_s=duration, versions=versions)


def catalog_to_dict(catalog: VideoCatalog) -> dict:
    return {
        "segment_duration_s": catalog.segment_duration_s,
        "versions": [
            {
                "index": v.index,
                "qp": v.qp,
                "avg_bitrate_kbps": v.avg_bitrate_kbps,
                "segment_bitrates_kbps": list(v.segment_bitrates_kbps),
            }
            for v in catalog.versions
        ],
    }


def load_catalog(path: str | Path) -> VideoCatalog:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CatalogError(f"cannot read catalog {path}: {exc}") from exc
    return catalog_from_dict(doc)


def save_catalog(catalog: VideoCatalog, path: str | Path) -> None:
    Path(path).write_text(json.dumps(catalog_to_dict(catalog), indent=1) + "\n")


def generate_synthetic_catalog(
    seed: int,
    num_versions: int,
    num_segments: int,
    avg_bitrates: Sequence[float],
    vbr_swing: float,
    segment_duration_s: float = 2.0,
    qps: Sequence[int] | None = None,
) -> VideoCatalog:
    """Build a deterministic VBR catalog around the given version averages.

    Segment bitrates follow a slowly varying scene-complexity curve shared
    by all versions plus a smaller per-version component, so complex scenes
    are expensive at every quality level. Each version's fluctuation is
    zero-mean and scaled to stay within ``±vbr_swing`` of its average.
    """
    avg = [float(a) for a in avg_bitrates]
    if len(avg) != num_versions:
        raise CatalogError(f"expected {num_versions} averages, got {len(avg)}")
    if any(b <= a for a, b in zip(avg, avg[1:])):
        raise CatalogError("avg_bitrates must be strictly ascending")
    if not 0 <= vbr_swing < 1:
        raise CatalogError(f"vbr_swing must be in [0, 1), got {vbr_swing}")
    if num_segments < 1:
        raise CatalogError("num_segments must be >= 1")
    if qps is None:
        qps = [13 + 3 * (num_versions - 1 - k) for k in range(num_versions)]

    rng = np.random.default_rng(seed)
    scene = _ar1(rng, num_segments, 0.85)
    versions = []
    for k in range(num_versions):
        if vbr_swing == 0 or num_segments == 1:
            rates = [avg[k]] * num_segments
        else:
            shape = 0.8 * scene + 0.2 * _ar1(rng, num_segments, 0.5)
            shape = shape - shape.mean()
            peak = np.abs(shape).max()
            if peak > 0:
                shape = shape / peak
            rates = [round(x, 3) for x in (avg[k] * (1.0 + vbr_swing * shape)).tolist()]
        versions.append(
            Version(index=k, qp=int(qps[k]), avg_bitrate_kbps=avg[k], segment_bitrates_kbps=tuple(rates))
        )
    return VideoCatalog(segment_duration_s=float(segment_duration_s), versions=tuple(versions))


def _ar1(rng: np.random.Generator, n: int, rho: float) -> np.ndarray:
    noise = rng.standard_normal(n)
    out = np.empty(n)
    out[0] = noise[0]
    for i in range(1, n):
        out[i] = rho * out[i - 1] + math.sqrt(1 - rho * rho) * noise[i]
    return out
