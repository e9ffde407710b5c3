"""Figures for reports: subset masses, coalition seat distributions and tails.

Everything renders with the Agg backend to files; nothing opens a window.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .apportion import SeatDistribution  # noqa: E402
from .rules import KSubsetDistribution  # noqa: E402

PathLike = Union[str, Path]


def _save(fig, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def _label(subset: Sequence[int]) -> str:
    return "{" + ",".join(map(str, subset)) + "}"


def plot_subset_distribution(dist: KSubsetDistribution, path: PathLike,
                             title: str = "", limit: int = 40) -> Path:
    """Bar chart of the heaviest ``limit`` subsets."""
    items = sorted(((s, float(m)) for s, m in dist if m > 0), key=lambda t: -t[1])[:limit]
    fig, ax = plt.subplots(figsize=(max(4.0, 0.35 * len(items) + 2), 3.5))
    ax.bar(range(len(items)), [m for _, m in items], color="tab:blue")
    ax.set_xticks(range(len(items)))
    ax.set_xticklabels([_label(s) for s, _ in items], rotation=60, ha="right", fontsize=7)
    ax.set_ylabel("probability")
    ax.set_title(title or f"rounded-up sets (n={dist.n}, k={dist.k})")
    return _save(fig, path)


def plot_coalition_seats(dist: SeatDistribution, coalition: Iterable[int], path: PathLike,
                         title: str = "") -> Path:
    coalition = tuple(coalition)
    pmf = [float(x) for x in dist.coalition_pmf(coalition)]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.bar(range(len(pmf)), pmf, color="tab:green")
    ax.set_xlabel(f"seats of coalition {_label(coalition)}")
    ax.set_ylabel("probability")
    ax.set_title(title or "coalition seat distribution")
    return _save(fig, path)


def plot_tail_comparison(old: SeatDistribution, new: SeatDistribution, coalition: Iterable[int],
                         path: PathLike, violations: Optional[Sequence[int]] = None,
                         title: str = "") -> Path:
    """Step plot of P[seats >= theta] before and after; violated thresholds are marked."""
    coalition = tuple(coalition)
    t_old = [float(x) for x in old.tail(coalition)]
    t_new = [float(x) for x in new.tail(coalition)]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.step(range(len(t_old)), t_old, where="mid", label="old", color="tab:gray")
    ax.step(range(len(t_new)), t_new, where="mid", label="new", color="tab:red")
    for theta in violations or ():
        ax.axvline(theta, color="tab:red", linestyle=":", linewidth=1)
    ax.set_xlabel("threshold theta")
    ax.set_ylabel(f"P[{_label(coalition)} seats >= theta]")
    ax.set_title(title or "threshold tails")
    ax.legend()
    return _save(fig, path)
