"""Regenerate the bundled catalog and scenario fixtures under src/vasrsim/data."""

import json
from pathlib import Path

from vasrsim.catalog import generate_synthetic_catalog, save_catalog
from vasrsim.netmodel import BandwidthTrace, write_trace_csv

DATA = Path(__file__).resolve().parents[1] / "src" / "vasrsim" / "data"

LADDER_KBPS = [354, 472, 638, 882, 1234, 1779, 2588, 3823, 5613, 8028, 11156, 15227]
QPS = [46, 43, 40, 37, 34, 31, 28, 25, 22, 19, 16, 13]
HORIZON_S = 2000.0

# per-path (start_s, kbps) breakpoints; path 0 is the min-hop path s2-s3-s1
TRACES = {
    0: [(0, 10000), (150, 400), (560, 20000)],
    1: [(0, 4000), (140, 24000), (330, 700), (460, 22000), (560, 20000)],
    2: [(0, 2500), (300, 23000), (560, 20000)],
    3: [(0, 6000), (200, 2000), (400, 800), (480, 3000), (560, 20000)],
}
HOPS = [
    ["s2", "s3", "s1"],
    ["s2", "s3", "s4", "s1"],
    ["s2", "s5", "s3", "s1"],
    ["s2", "s5", "s3", "s4", "s1"],
]


def main():
    cat = generate_synthetic_catalog(
        seed=1, num_versions=12, num_segments=327, avg_bitrates=LADDER_KBPS, vbr_swing=0.5, qps=QPS
    )
    save_catalog(cat, DATA / "elephants_dream.catalog.json")
    paths = []
    for pid, pairs in TRACES.items():
        name = f"fig6_like_path{pid}.trace.csv"
        write_trace_csv(BandwidthTrace.from_pairs(pairs, HORIZON_S), DATA / name)
        paths.append({"id": pid, "hops": HOPS[pid], "trace": name})
    scenario = {
        "switches": ["s1", "s2", "s3", "s4", "s5"],
        "server_switch": "s2",
        "client_switch": "s1",
        "horizon_s": HORIZON_S,
        "paths": paths,
    }
    (DATA / "fig6_like.scenario.json").write_text(json.dumps(scenario, indent=2) + "\n")


if __name__ == "__main__":
    main()
