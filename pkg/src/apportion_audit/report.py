"""JSON reports written by the command-line tool, and their inverse.

Reports are written with sorted keys so that identical inputs give
byte-identical files apart from the ``timings`` block.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional, Union

from . import __version__
from .apportion import SeatDistribution
from .rules import KSubsetDistribution
from .serialize import format_scalar, parse_scalar, parse_subset_key, to_jsonable

TOOL = "apportion-audit"


def distribution_payload(dist: KSubsetDistribution) -> dict:
    return {
        "n": dist.n,
        "k": dist.k,
        "mass": {"{" + ",".join(map(str, s)) + "}": format_scalar(m) for s, m in dist},
        "marginals": [format_scalar(x) for x in dist.marginals()],
    }


def parse_distribution(payload: dict) -> KSubsetDistribution:
    """Rebuild a subset distribution from :func:`distribution_payload` output."""
    items = [(parse_subset_key(key), parse_scalar(value))
             for key, value in payload["mass"].items()]
    return KSubsetDistribution.from_items(int(payload["n"]), int(payload["k"]), items)


def seat_payload(dist: SeatDistribution) -> dict:
    return {
        "house_size": dist.h,
        "seats": [[list(seats), format_scalar(m)] for seats, m in dist],
        "expected_seats": [format_scalar(x) for x in dist.expected_seats()],
    }


def parse_seat_distribution(payload: dict, quota_ref=None) -> SeatDistribution:
    mass = {tuple(int(x) for x in seats): parse_scalar(m) for seats, m in payload["seats"]}
    n = len(next(iter(mass))) if mass else 0
    return SeatDistribution(n, int(payload["house_size"]), mass, quota_ref)


def build_report(command: str, inputs: dict, mode: str, results: dict,
                 timings: Optional[dict] = None) -> dict:
    return {
        "tool": TOOL,
        "version": __version__,
        "command": command,
        "mode": mode,
        "input": to_jsonable(inputs),
        "results": to_jsonable(results),
        "timings": {k: round(v, 6) for k, v in (timings or {}).items()},
    }


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def write_report(report: dict, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_report(report))
    return path


def load_report(path: Union[str, Path]) -> dict:
    return json.loads(Path(path).read_text())
