"""Scoring for the rigid-object assessment protocol and the soft-object benchmarks.

Trial logs are line-delimited JSON (``data/trials.schema.json``). The point
schedule for rigid and articulated objects lives in ``data/ycb_weights.json``
and can be swapped for another table with the same layout.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import jsonschema

from .errors import ConfigParseError, ValidationError
from .types import GraspMode

TRIALS_SCHEMA_VERSION = 1
MODES: Tuple[GraspMode, ...] = tuple(GraspMode)
POSITION_ALIASES = {"Δx": "dx", "Δy": "dy", "Δz": "dz", "O": "O", "dx": "dx", "dy": "dy", "dz": "dz"}
EDGE_TYPES = ("single", "double", "folded")


# --------------------------------------------------------------------------
# weight table

@dataclass(frozen=True)
class WeightTable:
    positions: Tuple[str, ...]
    cell_names: Tuple[str, ...]
    cell_points: Tuple[float, ...]
    attempts: int
    attempt_points: float
    rigid_objects: Tuple[str, ...]
    articulated_objects: Tuple[str, ...]

    def __post_init__(self):
        names = self.rigid_objects + self.articulated_objects
        if len(set(names)) != len(names):
            raise ValidationError("weight table lists an object twice")
        if len(self.cell_names) != len(self.cell_points):
            raise ValidationError("cell_names and cell_points differ in length")
        if any(p < 0 for p in self.cell_points) or self.attempt_points < 0 or self.attempts < 1:
            raise ValidationError("weights must be non-negative and attempts >= 1")

    @property
    def objects(self) -> Tuple[str, ...]:
        return self.rigid_objects + self.articulated_objects

    def is_articulated(self, object_id: str) -> bool:
        if object_id in self.articulated_objects:
            return True
        if object_id in self.rigid_objects:
            return False
        raise ValidationError(f"object {object_id!r} is not in the weight table")

    def object_max(self, object_id: str) -> float:
        if self.is_articulated(object_id):
            return self.attempts * self.attempt_points
        return len(self.positions) * sum(self.cell_points)

    @property
    def max_score(self) -> float:
        return sum(self.object_max(o) for o in self.objects)


def weights_from_dict(d: dict) -> WeightTable:
    try:
        return WeightTable(
            positions=tuple(POSITION_ALIASES.get(p, p) for p in d["positions"]),
            cell_names=tuple(d["rigid"]["cells"]),
            cell_points=tuple(float(x) for x in d["rigid"]["cell_points"]),
            attempts=int(d["articulated"]["attempts"]),
            attempt_points=float(d["articulated"]["attempt_points"]),
            rigid_objects=tuple(d["objects"]["rigid"]),
            articulated_objects=tuple(d["objects"]["articulated"]),
        )
    except (KeyError, TypeError) as exc:
        raise ConfigParseError(f"malformed weight table: {exc}") from None


def load_weights(path=None) -> WeightTable:
    """Read a weight table; ``None`` or ``"default"`` loads the bundled one."""
    try:
        if path is None or str(path) == "default":
            text = resources.files("tendongrip").joinpath("data/ycb_weights.json").read_text()
        else:
            text = Path(path).read_text(encoding="utf-8")
        data = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigParseError(f"cannot read weight table {path}: {exc}") from None
    return weights_from_dict(data)


# --------------------------------------------------------------------------
# trial records

@dataclass(frozen=True)
class YcbTrial:
    """One object in one mode at one position.

    Rigid objects carry one boolean per protocol stage, articulated objects
    one per attempt and no position.
    """

    object_id: str
    mode: GraspMode
    position: Optional[str]
    cells: Tuple[bool, ...]

    def __post_init__(self):
        object.__setattr__(self, "mode", GraspMode.parse(self.mode))
        object.__setattr__(self, "cells", tuple(bool(c) for c in self.cells))
        if self.position is not None:
            pos = POSITION_ALIASES.get(self.position)
            if pos is None:
                raise ValidationError(f"unknown position {self.position!r}")
            object.__setattr__(self, "position", pos)
            # stages are attempted in order; a later one cannot pass after a failure
            seen_false = False
            for c in self.cells:
                if c and seen_false:
                    raise ValidationError(
                        f"{self.object_id}/{self.mode.value}/{pos}: a cell passes after an earlier failure"
                    )
                seen_false = seen_false or not c
        if not self.cells:
            raise ValidationError("a trial needs at least one cell")

    @property
    def key(self):
        return (self.object_id, self.mode, self.position)


@dataclass(frozen=True)
class SoftTrial:
    benchmark: str
    garment_id: str
    success: bool
    edge_type: Optional[str] = None
    placement_error: Optional[float] = None
    lift_height: Optional[float] = None

    def __post_init__(self):
        if self.benchmark not in ("A", "C", "D"):
            raise ValidationError(f"unknown soft benchmark {self.benchmark!r}")
        if self.benchmark == "A":
            if self.edge_type not in EDGE_TYPES:
                raise ValidationError("benchmark A trials need an edge_type")
        elif self.edge_type is not None:
            raise ValidationError("edge_type only applies to benchmark A")
        if self.placement_error is not None:
            if self.benchmark != "A" or not self.success:
                raise ValidationError("placement_error is recorded only for successful A drags")
            if self.placement_error < 0:
                raise ValidationError("placement_error must be >= 0")
        if self.lift_height is not None:
            if self.benchmark != "C" or not self.success:
                raise ValidationError("lift_height is recorded only for successful C lifts")
            if self.lift_height < 0:
                raise ValidationError("lift_height must be >= 0")


def _schema():
    text = resources.files("tendongrip").joinpath("data/trials.schema.json").read_text()
    return json.loads(text)


def parse_trials(lines: Iterable[str]) -> Tuple[List[YcbTrial], List[SoftTrial]]:
    """Parse JSONL records; blank lines are skipped."""
    validator = jsonschema.Draft202012Validator(_schema())
    ycb, soft = [], []
    for n, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ConfigParseError(f"line {n}: malformed JSON ({exc})") from None
        err = jsonschema.exceptions.best_match(validator.iter_errors(rec))
        if err is not None:
            raise ValidationError(f"line {n}: {err.message}")
        try:
            if rec["kind"] == "ycb":
                ycb.append(YcbTrial(rec["object_id"], rec["mode"], rec.get("position"), tuple(rec["cells"])))
            else:
                soft.append(SoftTrial(
                    rec["benchmark"], rec["garment_id"], rec["success"],
                    rec.get("edge_type"), rec.get("placement_error"), rec.get("lift_height"),
                ))
        except ValidationError as exc:
            raise ValidationError(f"line {n}: {exc}") from None
    return ycb, soft


def load_trials(path) -> Tuple[List[YcbTrial], List[SoftTrial]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigParseError(f"cannot read trial log {path}: {exc}") from None
    return parse_trials(text.splitlines())


def trial_to_dict(trial) -> dict:
    if isinstance(trial, YcbTrial):
        return {
            "schema_version": TRIALS_SCHEMA_VERSION, "kind": "ycb", "object_id": trial.object_id,
            "mode": trial.mode.value, "position": trial.position, "cells": list(trial.cells),
        }
    d = {"schema_version": TRIALS_SCHEMA_VERSION, "kind": "soft", "benchmark": trial.benchmark,
         "garment_id": trial.garment_id, "success": trial.success}
    for k in ("edge_type", "placement_error", "lift_height"):
        if getattr(trial, k) is not None:
            d[k] = getattr(trial, k)
    return d


# --------------------------------------------------------------------------
# rigid-object scoring

@dataclass(frozen=True)
class ScoreReport:
    per_mode: Dict[str, float]
    combined: float
    per_object: Dict[str, Dict[str, float]]
    max_score: float
    cells: Dict[Tuple[str, str, Optional[str]], Tuple[bool, ...]] = field(default_factory=dict, repr=False)

    def to_dict(self) -> dict:
        return {
            "max_score": self.max_score,
            "per_mode": dict(self.per_mode),
            "combined": self.combined,
            "per_object": {o: dict(s) for o, s in self.per_object.items()},
        }


def trial_score(trial: YcbTrial, weights: WeightTable) -> float:
    if weights.is_articulated(trial.object_id):
        if trial.position is not None:
            raise ValidationError(f"articulated object {trial.object_id} takes no position")
        if len(trial.cells) != weights.attempts:
            raise ValidationError(f"{trial.object_id}: expected {weights.attempts} attempts, got {len(trial.cells)}")
        return weights.attempt_points * sum(trial.cells)
    if trial.position not in weights.positions:
        raise ValidationError(f"{trial.object_id}: position must be one of {weights.positions}")
    if len(trial.cells) != len(weights.cell_points):
        raise ValidationError(f"{trial.object_id}: expected {len(weights.cell_points)} cells, got {len(trial.cells)}")
    return sum(p for p, c in zip(weights.cell_points, trial.cells) if c)


def score_ycb(trials: Sequence[YcbTrial], weights: Optional[WeightTable] = None) -> ScoreReport:
    """Per-mode totals and the best-of-mode combined total.

    Each object contributes, to the combined total, its highest score over
    the modes it was tried in.
    """
    weights = load_weights() if weights is None else weights
    seen = set()
    per = {}  # (object, mode) -> score
    cells = {}
    for t in trials:
        if t.key in seen:
            raise ValidationError(f"duplicate trial {t.object_id}/{t.mode.value}/{t.position}")
        seen.add(t.key)
        s = trial_score(t, weights)
        k = (t.object_id, t.mode.value)
        per[k] = per.get(k, 0.0) + s
        cells[(t.object_id, t.mode.value, t.position)] = t.cells
    per_mode = {m.value: 0.0 for m in MODES}
    for (_, mode), s in per.items():
        per_mode[mode] += s
    per_object = {}
    combined = 0.0
    for obj in weights.objects:
        scores = {m.value: per[(obj, m.value)] for m in MODES if (obj, m.value) in per}
        if scores:
            per_object[obj] = scores
            combined += max(scores.values())
    return ScoreReport(per_mode, combined, per_object, weights.max_score, cells)


_CELL_CHARS = {True: "#", False: "."}


def markdown_grid(report: ScoreReport, weights: Optional[WeightTable] = None) -> str:
    """Object/position rows against mode columns, one character per cell."""
    weights = load_weights() if weights is None else weights
    modes = [m.value for m in MODES]
    lines = ["| object | position | " + " | ".join(modes) + " |", "|---|---|" + "---|" * len(modes)]
    for obj in weights.objects:
        if obj not in report.per_object:
            continue
        positions = [None] if weights.is_articulated(obj) else list(weights.positions)
        for pos in positions:
            row = []
            for m in modes:
                c = report.cells.get((obj, m, pos))
                if c is None:
                    row.append(" ")
                elif pos is None:
                    row.append(f"{sum(c)}/{len(c)}")
                else:
                    row.append("".join(_CELL_CHARS[v] for v in c))
            lines.append(f"| {obj} | {pos or '-'} | " + " | ".join(row) + " |")
    lines.append("")
    lines.append("| total | | " + " | ".join(f"{report.per_mode[m]:g}" for m in modes) + " |")
    lines.append("")
    lines.append(f"combined (best mode per object): {report.combined:g} / {report.max_score:g}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# soft-object benchmarks

def lower_median(values: Sequence[float]) -> Optional[float]:
    """Middle value, taking the lower of the two middles for even counts."""
    if not values:
        return None
    v = sorted(values)
    return v[(len(v) - 1) // 2]


@dataclass(frozen=True)
class SoftGroup:
    attempts: int
    successes: int
    median: Optional[float] = None

    @property
    def success_rate(self) -> float:
        return self.successes / self.attempts

    def to_dict(self, median_key: Optional[str]) -> dict:
        d = {"attempts": self.attempts, "successes": self.successes, "success_rate": self.success_rate}
        if median_key:
            d[median_key] = self.median
        return d


@dataclass(frozen=True)
class SoftReport:
    benchmark: str
    groups: Dict[str, SoftGroup]
    empty: bool = False

    _MEDIAN_KEYS = {"A": "median_error", "C": "median_lift_height", "D": None}

    def __getitem__(self, key) -> SoftGroup:
        return self.groups[key]

    def to_dict(self) -> dict:
        if self.empty:
            return {"benchmark": self.benchmark, "empty": True}
        mk = self._MEDIAN_KEYS[self.benchmark]
        return {"benchmark": self.benchmark, "groups": {k: g.to_dict(mk) for k, g in self.groups.items()}}


def _only(trials, bench):
    trials = list(trials)
    for t in trials:
        if t.benchmark != bench:
            raise ValidationError(f"expected benchmark {bench} trials, got {t.benchmark}")
    return trials


def _group(trials, key, value):
    groups = {}
    for t in trials:
        groups.setdefault(key(t), []).append(t)
    out = {}
    for k in sorted(groups):
        ts = groups[k]
        ok = [t for t in ts if t.success]
        vals = [value(t) for t in ok if value(t) is not None] if value else []
        out[k] = SoftGroup(len(ts), len(ok), lower_median(vals))
    return out


def score_soft_A(trials: Sequence[SoftTrial], by: str = "edge_type") -> SoftReport:
    """Edge-drag benchmark: success rate and median placement error per group.

    Groups are edge types by default; ``by="garment_id"`` groups by garment.
    """
    trials = _only(trials, "A")
    if not trials:
        return SoftReport("A", {}, empty=True)
    if by not in ("edge_type", "garment_id"):
        raise ValidationError("benchmark A groups by edge_type or garment_id")
    return SoftReport("A", _group(trials, lambda t: getattr(t, by), lambda t: t.placement_error))


def score_soft_C(trials: Sequence[SoftTrial]) -> SoftReport:
    trials = _only(trials, "C")
    if not trials:
        return SoftReport("C", {}, empty=True)
    return SoftReport("C", _group(trials, lambda t: t.garment_id, lambda t: t.lift_height))


def score_soft_D(trials: Sequence[SoftTrial]) -> SoftReport:
    trials = _only(trials, "D")
    if not trials:
        return SoftReport("D", {}, empty=True)
    return SoftReport("D", _group(trials, lambda t: t.garment_id, None))


def score_log(ycb: Sequence[YcbTrial], soft: Sequence[SoftTrial], weights: Optional[WeightTable] = None) -> dict:
    """Full report for a mixed log, as written to ``report.json``."""
    weights = load_weights() if weights is None else weights
    out = {"ycb": score_ycb(ycb, weights).to_dict() if ycb else {"empty": True}}
    for bench, fn in (("A", score_soft_A), ("C", score_soft_C), ("D", score_soft_D)):
        out[f"soft_{bench}"] = fn([t for t in soft if t.benchmark == bench]).to_dict()
    return out


def full_success_log(weights: Optional[WeightTable] = None, modes: Sequence[GraspMode] = MODES) -> List[YcbTrial]:
    """Every object passing every cell in every listed mode."""
    weights = load_weights() if weights is None else weights
    out = []
    for m in modes:
        for obj in weights.rigid_objects:
            for pos in weights.positions:
                out.append(YcbTrial(obj, m, pos, (True,) * len(weights.cell_points)))
        for obj in weights.articulated_objects:
            out.append(YcbTrial(obj, m, None, (True,) * weights.attempts))
    return out
