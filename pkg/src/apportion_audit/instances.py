"""Instance files: JSON documents (votes or residues mode) and CSV vote tables.

A JSON instance looks like::

    {"mode": "votes", "votes": [110, 270, "210"], "house_size": 11,
     "order": [3, 1, 2], "options": {"precision_bits": 256}}

Numbers may be integers or exact decimal/fraction strings.  A CSV file has
one ``party,votes`` row per party (an optional header row is skipped) and
needs the house size from elsewhere.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Tuple, Union

from .core import (EXACT, Arithmetic, InvalidInputError, ResidueProfile, VoteProfile,
                   compute_quotas, to_fraction, validate_residues)

OPTION_KEYS = ("precision_bits", "residual_target", "max_restarts", "rng_seed")


@dataclass(frozen=True)
class InstanceFile:
    mode: str
    values: Tuple[Fraction, ...]
    house_size: Optional[int] = None
    order: Optional[Tuple[int, ...]] = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in ("votes", "residues"):
            raise InvalidInputError(f"mode must be 'votes' or 'residues', got {self.mode!r}")
        if not self.values:
            raise InvalidInputError("instance has no parties")
        if self.mode == "votes" and self.house_size is None:
            raise InvalidInputError("votes mode needs a house_size")
        if self.mode == "residues":
            total = sum(self.values)
            if total.denominator != 1:
                raise InvalidInputError(f"residues sum to {total}, which is not an integer")
        if self.order is not None and sorted(self.order) != list(range(1, len(self.values) + 1)):
            raise InvalidInputError(f"order {self.order} is not a permutation of 1..{len(self.values)}")
        unknown = set(self.options) - set(OPTION_KEYS)
        if unknown:
            raise InvalidInputError(f"unknown rule options: {sorted(unknown)}")

    @property
    def n(self) -> int:
        return len(self.values)

    def vote_profile(self, mode: Arithmetic = EXACT) -> VoteProfile:
        if self.mode != "votes":
            raise InvalidInputError("this instance holds residues, not votes")
        return VoteProfile.of(self.values, self.house_size, mode)

    def residue_profile(self, mode: Arithmetic = EXACT) -> ResidueProfile:
        if self.mode == "votes":
            return compute_quotas(self.vote_profile(mode)).residues
        return validate_residues(self.values, mode)

    def echo(self) -> dict:
        """JSON-ready copy of the instance for reports."""
        out = {"mode": self.mode, self.mode: [_text(v) for v in self.values]}
        if self.house_size is not None:
            out["house_size"] = self.house_size
        if self.order is not None:
            out["order"] = list(self.order)
        if self.options:
            out["options"] = dict(self.options)
        return out


def _text(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _number(x) -> Fraction:
    if isinstance(x, float):
        raise InvalidInputError(f"write {x!r} as a string to keep it exact")
    return to_fraction(x)


def instance_from_dict(doc: dict, house_size: Optional[int] = None) -> InstanceFile:
    if not isinstance(doc, dict):
        raise InvalidInputError("instance must be a JSON object")
    mode = doc.get("mode", "votes")
    raw = doc.get(mode)
    if not isinstance(raw, list):
        raise InvalidInputError(f"instance needs a '{mode}' list")
    h = doc.get("house_size", house_size)
    if h is not None and (isinstance(h, bool) or not isinstance(h, int)):
        raise InvalidInputError("house_size must be an integer")
    order = doc.get("order")
    return InstanceFile(mode, tuple(_number(x) for x in raw), h,
                        tuple(int(i) for i in order) if order is not None else None,
                        dict(doc.get("options", {})))


def read_csv_votes(path: Union[str, Path], house_size: Optional[int]) -> InstanceFile:
    votes = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
                continue
            if len(row) != 2:
                raise InvalidInputError(f"expected 'party,votes', got {row!r}")
            try:
                votes.append(_number(row[1].strip()))
            except InvalidInputError:
                if votes:
                    raise
                continue  # header row
    return InstanceFile("votes", tuple(votes), house_size)


def load_instance(path: Union[str, Path], house_size: Optional[int] = None) -> InstanceFile:
    """Read a JSON or CSV instance; ``house_size`` fills in when the file lacks one."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return read_csv_votes(path, house_size)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}: malformed JSON ({exc.msg})") from None
    return instance_from_dict(doc, house_size)
