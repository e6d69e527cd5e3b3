"""Run a suite of generated instances and aggregate the reports.

A suite manifest is JSON:

    {"mode": "circuit",
     "instances": [{"family": "planted_cycle", "params": {"n": 20, "p": 0.15},
                    "seeds": [0, 1, 2]}]}

`seeds` may also be an integer count (seeds 0..count-1). Each entry may
override `mode`. The same seed drives both the generator and the solver.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any

from .errors import InvalidParams
from .generators import generate
from .policy import PolicyConfig
from .solver import solve

DEFAULT_SUITE: dict[str, Any] = {
    "mode": "circuit",
    "instances": [
        {"family": "planted_cycle", "params": {"n": 12, "p": 0.15}, "seeds": 5},
        {"family": "planted_cycle", "params": {"n": 20, "p": 0.15}, "seeds": 5},
        {"family": "planted_path", "params": {"n": 12, "p": 0.15}, "seeds": 5, "mode": "path"},
        {"family": "gnp_connected", "params": {"n": 10, "p": 0.4}, "seeds": 5},
        {"family": "grid", "params": {"rows": 4, "cols": 4}, "seeds": 2},
        {"family": "named", "params": {"name": "petersen"}, "seeds": 1, "mode": "path"},
    ],
}


def load_suite(path: str | Path | None) -> dict[str, Any]:
    if path is None:
        return DEFAULT_SUITE
    with open(path, encoding="utf-8") as fh:
        suite = json.load(fh)
    if not isinstance(suite, dict) or not isinstance(suite.get("instances"), list):
        raise InvalidParams("suite manifest needs an 'instances' list")
    return suite


def expand(suite: dict[str, Any]) -> list[dict[str, Any]]:
    """Flatten a manifest into one job per (entry, seed)."""
    jobs = []
    default_mode = suite.get("mode", "circuit")
    for entry in suite["instances"]:
        if "family" not in entry:
            raise InvalidParams(f"suite entry without a family: {entry}")
        seeds = entry.get("seeds", 1)
        seeds = list(range(seeds)) if isinstance(seeds, int) else [int(s) for s in seeds]
        for seed in seeds:
            jobs.append({
                "family": entry["family"],
                "params": dict(entry.get("params", {})),
                "seed": seed,
                "mode": entry.get("mode", default_mode),
            })
    return jobs


def _run_job(job: dict[str, Any], config: dict[str, Any] | None, split_blocks: bool) -> dict[str, Any]:
    g = generate(job["family"], job["params"], job["seed"])
    cfg = PolicyConfig.from_dict(config) if config else None
    rep = solve(g, job["mode"], job["seed"], config=cfg, split_blocks=split_blocks)
    return {"instance": job, "report": rep.to_dict()}


def aggregate(rows: list[dict[str, Any]]) -> dict[str, Any]:
    statuses = [r["report"]["status"] for r in rows]
    mus = [r["report"]["mu_x"] for r in rows]
    total = len(rows)
    found = statuses.count("found")
    return {
        "instances": total,
        "found": found,
        "aborted": statuses.count("aborted"),
        "mapping_failed": statuses.count("mapping_failed"),
        "success_rate": found / total if total else 0.0,
        "mean_mu_x": sum(mus) / total if total else 0.0,
        "min_mu_x": min(mus, default=0.0),
        "reports": rows,
    }


def run_suite(suite: dict[str, Any], config: PolicyConfig | None = None, workers: int = 1,
              split_blocks: bool = False) -> dict[str, Any]:
    jobs = expand(suite)
    cfg = config.to_dict() if config else None
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            # map keeps submission order, so the document does not depend on scheduling
            rows = list(pool.map(_run_job, jobs, [cfg] * len(jobs), [split_blocks] * len(jobs)))
    else:
        rows = [_run_job(job, cfg, split_blocks) for job in jobs]
    return aggregate(rows)
