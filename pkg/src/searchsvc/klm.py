"""Keystroke-level interaction-time estimator.

Scenarios are ordered steps timed either as fixed seconds or as operator
sequences against an operator table. All arithmetic is exact decimal at
0.01 s granularity so golden totals never drift.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal

from .errors import SpecParseError, UnknownOperatorError

CENT = Decimal("0.01")

# Seconds per operator. H (reach for mouse) and B (button click) plus P
# (point) anchor the shipped scenarios; K (keystroke) and M (mental
# preparation) are standard defaults and plain configuration.
DEFAULT_OPERATOR_SECONDS: dict[str, Decimal] = {
    "H": Decimal("0.40"),
    "B": Decimal("0.20"),
    "P": Decimal("1.10"),
    "K": Decimal("0.28"),
    "M": Decimal("1.35"),
}


@dataclass(frozen=True, slots=True)
class OperatorTable:
    seconds: dict[str, Decimal] = field(
        default_factory=lambda: dict(DEFAULT_OPERATOR_SECONDS))

    def __post_init__(self):
        for symbol, value in self.seconds.items():
            if value <= 0:
                raise ValueError(f"operator {symbol!r} must take > 0 seconds")

    def overridden(self, **overrides: Decimal | str | float) -> "OperatorTable":
        merged = dict(self.seconds)
        for symbol, value in overrides.items():
            merged[symbol] = Decimal(str(value))
        return OperatorTable(merged)

    def __getitem__(self, symbol: str) -> Decimal:
        if symbol not in self.seconds:
            raise UnknownOperatorError(f"unknown operator {symbol!r}")
        return self.seconds[symbol]


@dataclass(frozen=True, slots=True)
class KlmStep:
    """Exactly one timing form: a fixed duration or an operator sequence."""

    label: str
    fixed_seconds: Decimal | None = None
    operators: tuple[tuple[str, int], ...] | None = None

    def __post_init__(self):
        if (self.fixed_seconds is None) == (self.operators is None):
            raise ValueError("step needs exactly one of fixed_seconds/operators")
        if self.fixed_seconds is not None and self.fixed_seconds < 0:
            raise ValueError("fixed_seconds must be >= 0")

    def duration(self, table: OperatorTable) -> Decimal:
        if self.fixed_seconds is not None:
            return self.fixed_seconds.quantize(CENT)
        total = Decimal("0")
        for symbol, repeat in self.operators:
            total += table[symbol] * repeat
        return total.quantize(CENT)


@dataclass(frozen=True, slots=True)
class KlmScenario:
    name: str
    steps: tuple[KlmStep, ...] = ()


def estimate(scenario: KlmScenario,
             table: OperatorTable | None = None) -> Decimal:
    """Sum of step durations, exact to 0.01 s."""
    table = table or OperatorTable()
    total = Decimal("0")
    for step in scenario.steps:
        total += step.duration(table)
    return total.quantize(CENT)


@dataclass(frozen=True, slots=True)
class StepDelta:
    label: str
    seconds_a: Decimal | None
    seconds_b: Decimal | None

    @property
    def delta(self) -> Decimal | None:
        if self.seconds_a is None or self.seconds_b is None:
            return None
        return (self.seconds_a - self.seconds_b).quantize(CENT)


@dataclass(frozen=True, slots=True)
class Comparison:
    total_a: Decimal
    total_b: Decimal
    per_step: tuple[StepDelta, ...]

    @property
    def delta(self) -> Decimal:
        return (self.total_a - self.total_b).quantize(CENT)

    def to_json(self) -> dict:
        return {
            "total_a": float(self.total_a),
            "total_b": float(self.total_b),
            "delta": float(self.delta),
            "per_step": [
                {
                    "label": d.label,
                    "seconds_a": None if d.seconds_a is None else float(d.seconds_a),
                    "seconds_b": None if d.seconds_b is None else float(d.seconds_b),
                    "delta": None if d.delta is None else float(d.delta),
                }
                for d in self.per_step
            ],
        }


def compare(a: KlmScenario, b: KlmScenario,
            table: OperatorTable | None = None) -> Comparison:
    """Totals plus per-step deltas aligned by label; steps present on only one
    side are reported one-sided."""
    table = table or OperatorTable()
    durations_a = {s.label: s.duration(table) for s in a.steps}
    durations_b = {s.label: s.duration(table) for s in b.steps}
    labels = list(dict.fromkeys(
        [s.label for s in a.steps] + [s.label for s in b.steps]))
    per_step = tuple(
        StepDelta(label, durations_a.get(label), durations_b.get(label))
        for label in labels
    )
    return Comparison(estimate(a, table), estimate(b, table), per_step)


# ---------------------------------------------------------------------------
# Scenario files: {"name", "steps": [{"label", "seconds"} | {"label", "operators"}]}


def scenario_from_json_dict(raw: dict) -> KlmScenario:
    if not isinstance(raw, dict):
        raise SpecParseError("scenario must be a JSON object")
    name = raw.get("name")
    if not isinstance(name, str) or not name:
        raise SpecParseError("missing field name in scenario")
    steps_raw = raw.get("steps")
    if not isinstance(steps_raw, list):
        raise SpecParseError("missing field steps in scenario")
    steps = []
    for i, entry in enumerate(steps_raw):
        if not isinstance(entry, dict) or not isinstance(entry.get("label"), str):
            raise SpecParseError(f"bad step at steps[{i}]")
        has_seconds = "seconds" in entry
        has_operators = "operators" in entry
        if has_seconds == has_operators:
            raise SpecParseError(
                f"steps[{i}] needs exactly one of seconds/operators")
        if has_seconds:
            steps.append(KlmStep(label=entry["label"],
                                 fixed_seconds=Decimal(str(entry["seconds"]))))
        else:
            ops = []
            for pair in entry["operators"]:
                if (not isinstance(pair, list) or len(pair) != 2
                        or not isinstance(pair[0], str)):
                    raise SpecParseError(f"bad operator pair in steps[{i}]")
                ops.append((pair[0], int(pair[1])))
            steps.append(KlmStep(label=entry["label"], operators=tuple(ops)))
    return KlmScenario(name=name, steps=tuple(steps))


def load_scenario(text: str) -> KlmScenario:
    try:
        raw = json.loads(text, parse_float=lambda s: s)  # keep the literal text
    except json.JSONDecodeError as exc:
        raise SpecParseError(str(exc), line=exc.lineno, column=exc.colno) from exc
    return scenario_from_json_dict(raw)


def format_seconds(value: Decimal) -> str:
    """Shortest decimal text with at least one fractional digit: 18 -> 18.0."""
    text = format(value.quantize(CENT).normalize(), "f")
    return text if "." in text else text + ".0"
