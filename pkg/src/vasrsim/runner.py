"""Run one or many configured sessions and write their output files."""

from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .config import ExperimentConfig, RunSpec
from .engine import SessionLog, accounting_residual, run_session, segments_csv
from .metrics import MetricsReport, cdf, cdf_csv, summarize

log = logging.getLogger(__name__)

SUMMARY_FIELDS = (
    "run",
    "algorithm",
    "policy",
    "avg_bitrate_kbps",
    "avg_version_index",
    "avg_buffer_s",
    "frac_buffer_below_low",
    "num_switch_downs",
    "largest_switch_down_step",
    "total_stall_s",
    "num_stall_events",
    "truncated",
)


@dataclass
class RunResult:
    spec: RunSpec
    log: SessionLog
    report: MetricsReport | None

    @property
    def truncated(self) -> bool:
        return self.log.truncated


def execute(spec: RunSpec, catalog_path: str, scenario_path: str) -> RunResult:
    cfg = ExperimentConfig(Path(catalog_path), Path(scenario_path), (spec,))
    catalog, topology = cfg.load_inputs()
    session = spec.session(catalog, topology)
    slog = run_session(session)
    report = summarize(slog, spec.adaptation) if slog.records else None
    return RunResult(spec, slog, report)


def run_all(config: ExperimentConfig, parallel: int = 1) -> list[RunResult]:
    args = [(spec, str(config.catalog_path), str(config.scenario_path)) for spec in config.runs]
    if parallel > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            futures = [pool.submit(execute, *a) for a in args]
            return [f.result() for f in futures]
    return [execute(*a) for a in args]


def report_document(result: RunResult) -> dict:
    slog = result.log
    return {
        "name": result.spec.name,
        "config": result.spec.echo(),
        "metrics": result.report.as_dict() if result.report else None,
        "truncated": slog.truncated,
        "segments_completed": len(slog.records),
        "wall_end_s": slog.wall_end_s,
        "playback_start_s": slog.playback_start_s if slog.records else None,
        "path_switches": slog.path_switches,
        "accounting_residual_s": accounting_residual(slog),
    }


def write_run(result: RunResult, run_dir: Path) -> None:
    run_dir.mkdir(parents=True, exist_ok=True)
    slog = result.log
    (run_dir / "segments.csv").write_text(segments_csv(slog))
    (run_dir / "report.json").write_text(json.dumps(report_document(result), indent=2, sort_keys=True) + "\n")
    if slog.records:
        rates = [r.actual_bitrate_kbps for r in slog.records]
        tputs = [r.measured_throughput_kbps for r in slog.records]
        (run_dir / "bitrate_cdf.csv").write_text(cdf_csv(cdf(rates)))
        (run_dir / "downloadrate_cdf.csv").write_text(cdf_csv(cdf(tputs)))


def summary_csv(results: list[RunResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_FIELDS)
    for res in results:
        m = res.report.as_dict() if res.report else {}
        row = [res.spec.name, res.spec.algorithm, res.spec.controller.policy]
        # repr keeps the same digits json.dumps writes into report.json
        row += [repr(m[k]) if k in m else "" for k in SUMMARY_FIELDS[3:-1]]
        row.append(int(res.truncated))
        w.writerow(row)
    return buf.getvalue()


def run_matrix(config: ExperimentConfig, out_dir: str | Path, parallel: int = 1) -> list[RunResult]:
    out = Path(out_dir)
    results = run_all(config, parallel)
    for res in results:
        write_run(res, out / res.spec.name)
        if res.truncated:
            log.warning("run %s truncated after %d segments", res.spec.name, len(res.log.records))
    (out / "matrix_summary.csv").write_text(summary_csv(results))
    return results
