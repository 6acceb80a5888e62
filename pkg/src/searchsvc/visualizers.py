"""Pluggable renderers turning a result set into presentation models.

Three built-ins ship in every registry: a property table (the default), a
group-by-value partition, and a per-value count aggregation. Renderers are
pure: same result set and options, same model.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable

from .errors import DuplicateVisualizerError, InvalidOptionError, UnknownVisualizerError
from .extraction import DomainObject, ResultSet

DEFAULT_VISUALIZER = "table_of_properties"


@dataclass(frozen=True, slots=True)
class OptionSpec:
    option_name: str
    type: str  # string | property_ref | enum
    default: object = None
    choices: tuple[str, ...] = ()


@dataclass(frozen=True, slots=True)
class VisualizerDescriptor:
    id: str
    display_name: str
    options_schema: tuple[OptionSpec, ...] = ()

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "display_name": self.display_name,
            "options_schema": [
                {"option_name": o.option_name, "type": o.type,
                 "default": o.default,
                 **({"choices": list(o.choices)} if o.choices else {})}
                for o in self.options_schema
            ],
        }


@dataclass(frozen=True, slots=True)
class TableModel:
    columns: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]
    overflow: tuple[dict[str, str], ...]  # per row: properties beyond the limit

    def to_json(self) -> dict:
        return {
            "kind": "table",
            "columns": list(self.columns),
            "rows": [list(r) for r in self.rows],
            "overflow": [dict(o) for o in self.overflow],
        }


@dataclass(frozen=True, slots=True)
class GroupedModel:
    group_property: str
    groups: dict[str, tuple[DomainObject, ...]]
    missing_group: tuple[DomainObject, ...]

    def to_json(self) -> dict:
        return {
            "kind": "grouped",
            "group_property": self.group_property,
            "groups": {value: [o.to_json() for o in objs]
                       for value, objs in sorted(self.groups.items())},
            "missing_group": [o.to_json() for o in self.missing_group],
        }


@dataclass(frozen=True, slots=True)
class AggregateModel:
    dimension: str
    counts: dict[str, int]

    def to_json(self) -> dict:
        return {
            "kind": "aggregate",
            "dimension": self.dimension,
            "counts": dict(sorted(self.counts.items())),
        }


RenderFn = Callable[[ResultSet, dict], object]


def _cell(obj: DomainObject, name: str) -> str:
    value = obj.values.get(name)
    if value is None or value.is_missing or value.value is None:
        return ""
    return value.value


def _property_names(result_set: ResultSet) -> list[str]:
    for item in result_set.items:
        return list(item.values.keys())
    return []


def _render_table(result_set: ResultSet, options: dict) -> TableModel:
    names = _property_names(result_set)
    columns = options.get("columns")
    if columns is None:
        columns = names
    else:
        unknown = [c for c in columns if c not in names]
        if unknown and result_set.items:
            raise InvalidOptionError(f"unknown column(s) {unknown}")
    try:
        max_columns = int(options.get("max_columns", len(columns) or 1))
    except (TypeError, ValueError) as exc:
        raise InvalidOptionError(f"max_columns must be an integer: {exc}") from exc
    visible = list(columns)[:max(1, max_columns)]
    hidden = [n for n in names if n not in visible]

    rows = tuple(tuple(_cell(o, c) for c in visible) for o in result_set.items)
    overflow = tuple(
        {n: _cell(o, n) for n in hidden} for o in result_set.items
    )
    return TableModel(columns=tuple(visible), rows=rows, overflow=overflow)


def _require_property(result_set: ResultSet, options: dict, key: str) -> str:
    name = options.get(key)
    if not name:
        raise InvalidOptionError(f"option {key!r} is required")
    names = _property_names(result_set)
    if result_set.items and name not in names:
        raise InvalidOptionError(f"unknown property {name!r}")
    return name


def _render_grouped(result_set: ResultSet, options: dict) -> GroupedModel:
    prop = _require_property(result_set, options, "property")
    groups: dict[str, list[DomainObject]] = {}
    missing: list[DomainObject] = []
    for obj in result_set.items:
        value = obj.values.get(prop)
        if value is None or value.is_missing or value.value is None:
            missing.append(obj)
        else:
            groups.setdefault(value.value, []).append(obj)
    return GroupedModel(
        group_property=prop,
        groups={k: tuple(v) for k, v in groups.items()},
        missing_group=tuple(missing),
    )


def _render_aggregate(result_set: ResultSet, options: dict) -> AggregateModel:
    prop = _require_property(result_set, options, "property")
    counts: dict[str, int] = {}
    for obj in result_set.items:
        value = obj.values.get(prop)
        if value is not None and not value.is_missing and value.value is not None:
            counts[value.value] = counts.get(value.value, 0) + 1
    return AggregateModel(dimension=prop, counts=counts)


_BUILTINS: tuple[tuple[VisualizerDescriptor, RenderFn], ...] = (
    (
        VisualizerDescriptor(
            id="table_of_properties",
            display_name="Table of properties",
            options_schema=(
                OptionSpec("columns", "property_ref", default=None),
                OptionSpec("max_columns", "string", default=None),
            ),
        ),
        _render_table,
    ),
    (
        VisualizerDescriptor(
            id="group_by_property_value",
            display_name="Group by property value",
            options_schema=(OptionSpec("property", "property_ref"),),
        ),
        _render_grouped,
    ),
    (
        VisualizerDescriptor(
            id="aggregate_count",
            display_name="Count per property value",
            options_schema=(OptionSpec("property", "property_ref"),),
        ),
        _render_aggregate,
    ),
)


@dataclass
class VisualizerRegistry:
    """Holds descriptors and their render functions; every new registry starts
    with the three built-ins."""

    _entries: dict[str, tuple[VisualizerDescriptor, RenderFn]] = field(
        default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        for descriptor, fn in _BUILTINS:
            self._entries[descriptor.id] = (descriptor, fn)

    def register(self, descriptor: VisualizerDescriptor, render_fn: RenderFn) -> None:
        with self._lock:
            if descriptor.id in self._entries:
                raise DuplicateVisualizerError(
                    f"visualizer {descriptor.id!r} is already registered")
            self._entries[descriptor.id] = (descriptor, render_fn)

    def list(self) -> list[VisualizerDescriptor]:
        return [descriptor for descriptor, _ in self._entries.values()]

    def render(self, result_set: ResultSet, visualizer_id: str | None = None,
               options: dict | None = None):
        vid = visualizer_id or DEFAULT_VISUALIZER
        entry = self._entries.get(vid)
        if entry is None:
            raise UnknownVisualizerError(f"unknown visualizer {vid!r}")
        descriptor, fn = entry
        options = dict(options or {})
        known = {o.option_name for o in descriptor.options_schema}
        unknown = set(options) - known
        if unknown:
            raise InvalidOptionError(f"unknown option(s) {sorted(unknown)}")
        return fn(result_set, options)


default_registry = VisualizerRegistry()


def render(result_set: ResultSet, visualizer_id: str | None = None,
           options: dict | None = None,
           registry: VisualizerRegistry | None = None):
    return (registry or default_registry).render(result_set, visualizer_id, options)
