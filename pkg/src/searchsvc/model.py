"""Domain types for declarative search services, with validation, canonical
serialization and import/export bundles.

All types are immutable values; collections are tuples. The JSON wire form is
fixed: selectors serialize as {"kind","expression","expect_many"}, specs as a
top-level object mirroring ServiceSpec, bundles as {"format_version","services"}.
"""

from __future__ import annotations

import json
import re
import uuid
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone

from .errors import SpecParseError, VersionMismatchError

FORMAT_VERSION = "1"
SPEC_FILE_SUFFIX = ".svcspec.json"

SELECTOR_KINDS = ("css", "xpath")
LOCATIONS = ("in_result", "in_target")
EXTRACT_MODES = ("text", "attribute", "inner_html")
VARIANTS = (
    "write_and_click_to_reload",
    "write_and_click_for_ajax_call",
    "write_for_ajax_call",
    "api_based",
)
METHODS = ("GET", "POST")
RESPONSE_KINDS = ("full_document", "html_fragment")
DIRECTIONS = ("asc", "desc")
COMPARATORS = ("lexical", "numeric", "date")

_PLACEHOLDER = re.compile(r"\{(\w+)\}")
_ALLOWED_PLACEHOLDERS = {"query", "page"}


def new_service_id() -> str:
    return uuid.uuid4().hex[:12]


def utc_now_iso() -> str:
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat()


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True, slots=True)
class Selector:
    """A queryable locator over parsed HTML."""

    kind: str
    expression: str
    expect_many: bool = False


@dataclass(frozen=True, slots=True)
class EngineBinding:
    """The UI controls of the wrapped search engine."""

    search_page_url: str
    input: Selector
    trigger: Selector | None = None
    next_page: Selector | None = None
    prev_page: Selector | None = None
    reveal: Selector | None = None


@dataclass(frozen=True, slots=True)
class Extract:
    """How a property value is pulled from its matched node."""

    mode: str  # text | attribute | inner_html
    attr: str | None = None

    @classmethod
    def text(cls) -> "Extract":
        return cls("text")

    @classmethod
    def attribute(cls, name: str) -> "Extract":
        return cls("attribute", name)

    @classmethod
    def inner_html(cls) -> "Extract":
        return cls("inner_html")


@dataclass(frozen=True, slots=True)
class PropertySpec:
    name: str
    location: str  # in_result | in_target
    selector: Selector
    extract: Extract


@dataclass(frozen=True, slots=True)
class SearchResultSpec:
    """Declared structure of one result: container, mandatory target URL link,
    named properties."""

    type_name: str
    container: Selector
    target_url: PropertySpec | None
    properties: tuple[PropertySpec, ...]

    @property
    def property_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.properties)

    @property
    def in_target_properties(self) -> tuple[PropertySpec, ...]:
        return tuple(p for p in self.properties if p.location == "in_target")


@dataclass(frozen=True, slots=True)
class RequestModifier:
    """Headless encoding of a filter/ordering click: exactly one variant set."""

    url_override: str | None = None
    param_set: tuple[tuple[str, str], ...] | None = None
    path_suffix: str | None = None

    def populated_variants(self) -> list[str]:
        out = []
        if self.url_override is not None:
            out.append("url_override")
        if self.param_set is not None:
            out.append("param_set")
        if self.path_suffix is not None:
            out.append("path_suffix")
        return out


@dataclass(frozen=True, slots=True)
class Condition:
    name: str
    activation: RequestModifier


@dataclass(frozen=True, slots=True)
class ConditionGroup:
    group_name: str
    exclusive: bool
    conditions: tuple[Condition, ...]


@dataclass(frozen=True, slots=True)
class ConditionManager:
    groups: tuple[ConditionGroup, ...] = ()

    def all_conditions(self) -> tuple[Condition, ...]:
        return tuple(c for g in self.groups for c in g.conditions)

    def find(self, name: str) -> Condition | None:
        for group in self.groups:
            for cond in group.conditions:
                if cond.name == name:
                    return cond
        return None


@dataclass(frozen=True, slots=True)
class LocalOrdering:
    property: str
    direction: str  # asc | desc
    comparator: str  # lexical | numeric | date


@dataclass(frozen=True, slots=True)
class OrderingSpec:
    """Either a remote ordering (request modifier) or a local client-side sort."""

    name: str
    remote: RequestModifier | None = None
    local: LocalOrdering | None = None


@dataclass(frozen=True, slots=True)
class RequestTemplate:
    method: str  # GET | POST
    url_template: str
    static_params: tuple[tuple[str, str], ...] = ()
    response_kind: str = "full_document"

    def supports_paging(self) -> bool:
        return "{page}" in self.url_template or any(
            "{page}" in v for _, v in self.static_params
        )


@dataclass(frozen=True, slots=True)
class StrategyConfig:
    variant: str
    request_template: RequestTemplate | None = None
    provider_id: str | None = None


@dataclass(frozen=True, slots=True)
class ServiceMetadata:
    tags: tuple[str, ...] = ()
    created: str = ""
    format_version: str = FORMAT_VERSION


@dataclass(frozen=True, slots=True)
class ServiceSpec:
    """The full declarative description of one search service. strategy may be
    None while the service is still a draft (before strategy detection)."""

    id: str
    name: str
    binding: EngineBinding
    strategy: StrategyConfig | None
    result_spec: SearchResultSpec
    filters: ConditionManager = ConditionManager()
    orderings: tuple[OrderingSpec, ...] = ()
    metadata: ServiceMetadata = ServiceMetadata()

    def find_ordering(self, name: str) -> OrderingSpec | None:
        for ordering in self.orderings:
            if ordering.name == name:
                return ordering
        return None


@dataclass(frozen=True, slots=True)
class SearchQuery:
    keywords: str
    active_filters: tuple[str, ...] = ()
    active_ordering: str | None = None
    page: int = 1


# ---------------------------------------------------------------------------
# Validation


@dataclass(frozen=True, slots=True)
class Problem:
    severity: str  # "error" | "warning"
    path: str
    message: str


@dataclass(frozen=True, slots=True)
class ValidationReport:
    problems: tuple[Problem, ...] = ()

    @property
    def errors(self) -> tuple[Problem, ...]:
        return tuple(p for p in self.problems if p.severity == "error")

    @property
    def warnings(self) -> tuple[Problem, ...]:
        return tuple(p for p in self.problems if p.severity == "warning")

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_json(self) -> list[dict]:
        return [
            {"severity": p.severity, "path": p.path, "message": p.message}
            for p in self.problems
        ]


def _selector_problems(sel: Selector, path: str, unique_role: bool,
                       out: list[Problem]) -> None:
    if sel.kind not in SELECTOR_KINDS:
        out.append(Problem("error", path, f"unknown selector kind {sel.kind!r}"))
        return
    if not sel.expression or not sel.expression.strip():
        out.append(Problem("error", path, "selector expression is empty"))
        return
    # local import: the selectors package depends on this module
    from .selectors.eval import check_expression

    error = check_expression(sel.kind, sel.expression)
    if error:
        out.append(Problem("error", path, f"selector does not parse: {error}"))
    if unique_role and sel.expect_many:
        out.append(Problem(
            "error", path, "selector at a unique position must not expect many"
        ))


def _modifier_problems(mod: RequestModifier, path: str, out: list[Problem]) -> None:
    variants = mod.populated_variants()
    if len(variants) != 1:
        out.append(Problem(
            "error", path,
            f"exactly one modifier variant required, got {variants or 'none'}",
        ))
        return
    if mod.url_override is not None:
        _template_problems(mod.url_override, f"{path}.url_override", out,
                           require_query=False)


def _template_problems(template: str, path: str, out: list[Problem],
                       require_query: bool) -> None:
    unknown = sorted(set(_PLACEHOLDER.findall(template)) - _ALLOWED_PLACEHOLDERS)
    if unknown:
        out.append(Problem(
            "error", path,
            f"unknown placeholder(s) {unknown}; only {{query}} and {{page}} are allowed",
        ))
    if require_query and "{query}" not in template:
        out.append(Problem("error", path, "url_template must contain {query}"))


def validate_spec(spec: ServiceSpec) -> ValidationReport:
    """Total validation: never raises, returns every problem found."""
    out: list[Problem] = []
    try:
        _validate_into(spec, out)
    except Exception as exc:  # malformed object graphs still get a report
        out.append(Problem("error", "", f"spec is not inspectable: {exc}"))
    return ValidationReport(tuple(out))


def _validate_into(spec: ServiceSpec, out: list[Problem]) -> None:
    if not spec.id:
        out.append(Problem("error", "id", "id is empty"))
    if not spec.name:
        out.append(Problem("error", "name", "name is empty"))

    binding = spec.binding
    url = binding.search_page_url or ""
    if not re.match(r"https?://", url):
        out.append(Problem(
            "error", "binding.search_page_url",
            "must be an absolute http(s) URL",
        ))
    _selector_problems(binding.input, "binding.input", True, out)
    for role in ("trigger", "next_page", "prev_page", "reveal"):
        sel = getattr(binding, role)
        if sel is not None:
            _selector_problems(sel, f"binding.{role}", True, out)
    if binding.trigger is None:
        out.append(Problem(
            "warning", "binding.trigger",
            "no trigger bound; a keystroke or form-submit strategy is required",
        ))
    if binding.next_page is None:
        out.append(Problem(
            "warning", "binding.next_page",
            "no pagination control bound; only template paging can fetch more results",
        ))

    rs = spec.result_spec
    if not rs.type_name:
        out.append(Problem("error", "result_spec.type_name", "type_name is empty"))
    _selector_problems(rs.container, "result_spec.container", False, out)
    if not rs.container.expect_many:
        out.append(Problem(
            "error", "result_spec.container", "container must expect many matches"
        ))
    if rs.target_url is None:
        out.append(Problem(
            "error", "result_spec.target_url", "target_url is mandatory"
        ))
    else:
        _selector_problems(rs.target_url.selector, "result_spec.target_url.selector",
                           False, out)
        if rs.target_url.extract.mode != "attribute":
            out.append(Problem(
                "error", "result_spec.target_url.extract",
                "target_url must extract an attribute (a URL)",
            ))
    if not rs.properties:
        out.append(Problem(
            "error", "result_spec.properties", "at least one property is required"
        ))
    seen_names: set[str] = set()
    for i, prop in enumerate(rs.properties):
        path = f"result_spec.properties[{i}]"
        if not prop.name:
            out.append(Problem("error", f"{path}.name", "property name is empty"))
        elif prop.name in seen_names:
            out.append(Problem(
                "error", f"{path}.name", f"duplicate property name {prop.name!r}"
            ))
        seen_names.add(prop.name)
        if prop.location not in LOCATIONS:
            out.append(Problem(
                "error", f"{path}.location", f"unknown location {prop.location!r}"
            ))
        if prop.location == "in_target" and rs.target_url is None:
            out.append(Problem(
                "error", f"{path}.location",
                "in_target property requires result_spec.target_url",
            ))
        if prop.extract.mode not in EXTRACT_MODES:
            out.append(Problem(
                "error", f"{path}.extract", f"unknown extract mode {prop.extract.mode!r}"
            ))
        elif prop.extract.mode == "attribute" and not prop.extract.attr:
            out.append(Problem(
                "error", f"{path}.extract", "attribute extraction needs a name"
            ))
        _selector_problems(prop.selector, f"{path}.selector", False, out)

    strategy = spec.strategy
    if strategy is None:
        out.append(Problem(
            "warning", "strategy", "no strategy configured (draft service)"
        ))
    else:
        if strategy.variant not in VARIANTS:
            out.append(Problem(
                "error", "strategy.variant", f"unknown variant {strategy.variant!r}"
            ))
        if strategy.variant == "api_based":
            if not strategy.provider_id:
                out.append(Problem(
                    "error", "strategy.provider_id",
                    "api_based strategy requires a provider_id",
                ))
        else:
            template = strategy.request_template
            if template is None:
                out.append(Problem(
                    "error", "strategy.request_template",
                    "request_template is required for UI-based strategies",
                ))
            else:
                if template.method not in METHODS:
                    out.append(Problem(
                        "error", "strategy.request_template.method",
                        f"unknown method {template.method!r}",
                    ))
                if template.response_kind not in RESPONSE_KINDS:
                    out.append(Problem(
                        "error", "strategy.request_template.response_kind",
                        f"unknown response kind {template.response_kind!r}",
                    ))
                _template_problems(
                    template.url_template,
                    "strategy.request_template.url_template", out,
                    require_query=True,
                )
                for i, (_, value) in enumerate(template.static_params):
                    _template_problems(
                        value, f"strategy.request_template.static_params[{i}]",
                        out, require_query=False,
                    )

    cond_names: set[str] = set()
    for gi, group in enumerate(spec.filters.groups):
        gpath = f"filters.groups[{gi}]"
        if not group.group_name:
            out.append(Problem("error", f"{gpath}.group_name", "group name is empty"))
        for ci, cond in enumerate(group.conditions):
            cpath = f"{gpath}.conditions[{ci}]"
            if not cond.name:
                out.append(Problem("error", f"{cpath}.name", "condition name is empty"))
            elif cond.name in cond_names:
                out.append(Problem(
                    "error", f"{cpath}.name", f"duplicate condition name {cond.name!r}"
                ))
            cond_names.add(cond.name)
            _modifier_problems(cond.activation, f"{cpath}.activation", out)

    ordering_names: set[str] = set()
    for oi, ordering in enumerate(spec.orderings):
        opath = f"orderings[{oi}]"
        if not ordering.name:
            out.append(Problem("error", f"{opath}.name", "ordering name is empty"))
        elif ordering.name in ordering_names:
            out.append(Problem(
                "warning", f"{opath}.name", f"duplicate ordering name {ordering.name!r}"
            ))
        ordering_names.add(ordering.name)
        populated = [m for m in ("remote", "local")
                     if getattr(ordering, m) is not None]
        if len(populated) != 1:
            out.append(Problem(
                "error", opath,
                f"exactly one ordering mode required, got {populated or 'none'}",
            ))
            continue
        if ordering.remote is not None:
            _modifier_problems(ordering.remote, f"{opath}.remote", out)
        else:
            local = ordering.local
            if local.property not in spec.result_spec.property_names:
                out.append(Problem(
                    "error", f"{opath}.local.property",
                    f"unknown property {local.property!r}",
                ))
            if local.direction not in DIRECTIONS:
                out.append(Problem(
                    "error", f"{opath}.local.direction",
                    f"unknown direction {local.direction!r}",
                ))
            if local.comparator not in COMPARATORS:
                out.append(Problem(
                    "error", f"{opath}.local.comparator",
                    f"unknown comparator {local.comparator!r}",
                ))

    if spec.metadata.format_version != FORMAT_VERSION:
        out.append(Problem(
            "error", "metadata.format_version",
            f"expected {FORMAT_VERSION!r}, got {spec.metadata.format_version!r}",
        ))


def validate_query(spec: ServiceSpec, query: SearchQuery) -> list[str]:
    """Problems that make a query inconsistent with its spec (empty when fine)."""
    problems: list[str] = []
    if query.page < 1:
        problems.append(f"page must be >= 1, got {query.page}")
    active_by_group: dict[str, list[str]] = {}
    for name in query.active_filters:
        found = None
        for group in spec.filters.groups:
            for cond in group.conditions:
                if cond.name == name:
                    found = group
                    break
            if found:
                break
        if not found:
            problems.append(f"unknown filter {name!r}")
            continue
        active_by_group.setdefault(found.group_name, []).append(name)
        if found.exclusive and len(active_by_group[found.group_name]) > 1:
            problems.append(
                f"filters {active_by_group[found.group_name]} are mutually "
                f"exclusive in group {found.group_name!r}"
            )
    if query.active_ordering is not None:
        if spec.find_ordering(query.active_ordering) is None:
            problems.append(f"unknown ordering {query.active_ordering!r}")
    return problems


# ---------------------------------------------------------------------------
# JSON (de)serialization


def _selector_to_json(sel: Selector) -> dict:
    return {"kind": sel.kind, "expression": sel.expression,
            "expect_many": sel.expect_many}


def _opt(value, conv):
    return None if value is None else conv(value)


def _extract_to_json(ex: Extract):
    if ex.mode == "attribute":
        return {"attribute": ex.attr or ""}
    return ex.mode


def _property_to_json(prop: PropertySpec) -> dict:
    return {
        "name": prop.name,
        "location": prop.location,
        "selector": _selector_to_json(prop.selector),
        "extract": _extract_to_json(prop.extract),
    }


def _modifier_to_json(mod: RequestModifier) -> dict:
    if mod.url_override is not None:
        return {"url_override": mod.url_override}
    if mod.param_set is not None:
        return {"param_set": [[n, v] for n, v in mod.param_set]}
    return {"path_suffix": mod.path_suffix or ""}


def spec_to_json_dict(spec: ServiceSpec) -> dict:
    strategy = None
    if spec.strategy is not None:
        template = None
        if spec.strategy.request_template is not None:
            t = spec.strategy.request_template
            template = {
                "method": t.method,
                "url_template": t.url_template,
                "static_params": [[n, v] for n, v in t.static_params],
                "response_kind": t.response_kind,
            }
        strategy = {
            "variant": spec.strategy.variant,
            "provider_id": spec.strategy.provider_id,
            "request_template": template,
        }
    rs = spec.result_spec
    return {
        "id": spec.id,
        "name": spec.name,
        "binding": {
            "search_page_url": spec.binding.search_page_url,
            "input": _selector_to_json(spec.binding.input),
            "trigger": _opt(spec.binding.trigger, _selector_to_json),
            "next_page": _opt(spec.binding.next_page, _selector_to_json),
            "prev_page": _opt(spec.binding.prev_page, _selector_to_json),
            "reveal": _opt(spec.binding.reveal, _selector_to_json),
        },
        "strategy": strategy,
        "result_spec": {
            "type_name": rs.type_name,
            "container": _selector_to_json(rs.container),
            "target_url": _opt(rs.target_url, _property_to_json),
            "properties": [_property_to_json(p) for p in rs.properties],
        },
        "filters": {
            "groups": [
                {
                    "group_name": g.group_name,
                    "exclusive": g.exclusive,
                    "conditions": [
                        {"name": c.name, "activation": _modifier_to_json(c.activation)}
                        for c in g.conditions
                    ],
                }
                for g in spec.filters.groups
            ]
        },
        "orderings": [
            {
                "name": o.name,
                "mode": (
                    {"remote": _modifier_to_json(o.remote)}
                    if o.remote is not None
                    else {
                        "local": {
                            "property": o.local.property,
                            "direction": o.local.direction,
                            "comparator": o.local.comparator,
                        }
                    }
                ),
            }
            for o in spec.orderings
        ],
        "metadata": {
            "tags": list(spec.metadata.tags),
            "created": spec.metadata.created,
            "format_version": spec.metadata.format_version,
        },
    }


def canonical_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, ensure_ascii=False, indent=2) + "\n"


def serialize(spec: ServiceSpec) -> str:
    """Canonical text form: byte-stable for equal specs."""
    return canonical_json(spec_to_json_dict(spec))


class _Walker:
    """Schema walker that names the offending path on error."""

    def __init__(self, raw, path: str = ""):
        self.raw = raw
        self.path = path

    def _fail(self, key: str, why: str):
        where = f"{self.path}.{key}" if self.path else key
        raise SpecParseError(f"{why} at {where}")

    def child(self, key: str) -> "_Walker":
        return _Walker(self.raw[key], f"{self.path}.{key}" if self.path else key)

    def require(self, key: str):
        if not isinstance(self.raw, dict):
            raise SpecParseError(f"expected object at {self.path or '(root)'}")
        if key not in self.raw or self.raw[key] is None:
            self._fail(key, "missing field")
        return self.raw[key]

    def optional(self, key: str):
        if not isinstance(self.raw, dict):
            raise SpecParseError(f"expected object at {self.path or '(root)'}")
        return self.raw.get(key)

    def require_str(self, key: str) -> str:
        value = self.require(key)
        if not isinstance(value, str):
            self._fail(key, "expected string")
        return value

    def require_bool(self, key: str) -> bool:
        value = self.require(key)
        if not isinstance(value, bool):
            self._fail(key, "expected boolean")
        return value

    def require_list(self, key: str) -> list:
        value = self.require(key)
        if not isinstance(value, list):
            self._fail(key, "expected array")
        return value


def _selector_from_json(raw, path: str) -> Selector:
    w = _Walker(raw, path)
    return Selector(
        kind=w.require_str("kind"),
        expression=w.require_str("expression"),
        expect_many=w.require_bool("expect_many"),
    )


def _extract_from_json(raw, path: str) -> Extract:
    if isinstance(raw, str):
        if raw not in ("text", "inner_html"):
            raise SpecParseError(f"unknown extract mode {raw!r} at {path}")
        return Extract(raw)
    if isinstance(raw, dict) and isinstance(raw.get("attribute"), str):
        return Extract("attribute", raw["attribute"])
    raise SpecParseError(f"bad extract form at {path}")


def _property_from_json(raw, path: str) -> PropertySpec:
    w = _Walker(raw, path)
    return PropertySpec(
        name=w.require_str("name"),
        location=w.require_str("location"),
        selector=_selector_from_json(w.require("selector"), f"{path}.selector"),
        extract=_extract_from_json(w.require("extract"), f"{path}.extract"),
    )


def _params_from_json(raw, path: str) -> tuple[tuple[str, str], ...]:
    if not isinstance(raw, list):
        raise SpecParseError(f"expected array at {path}")
    out = []
    for i, pair in enumerate(raw):
        if (not isinstance(pair, list) or len(pair) != 2
                or not all(isinstance(x, str) for x in pair)):
            raise SpecParseError(f"expected [name, value] pair at {path}[{i}]")
        out.append((pair[0], pair[1]))
    return tuple(out)


def _modifier_from_json(raw, path: str) -> RequestModifier:
    if not isinstance(raw, dict):
        raise SpecParseError(f"expected object at {path}")
    if "url_override" in raw:
        return RequestModifier(url_override=raw["url_override"])
    if "param_set" in raw:
        return RequestModifier(param_set=_params_from_json(raw["param_set"],
                                                           f"{path}.param_set"))
    if "path_suffix" in raw:
        return RequestModifier(path_suffix=raw["path_suffix"])
    raise SpecParseError(f"empty request modifier at {path}")


def spec_from_json_dict(raw: dict) -> ServiceSpec:
    root = _Walker(raw)

    meta_raw = root.require("metadata")
    meta = _Walker(meta_raw, "metadata")
    version = meta.require_str("format_version")
    if version != FORMAT_VERSION:
        raise VersionMismatchError(
            f"unsupported format_version {version!r} (expected {FORMAT_VERSION!r})"
        )

    binding_w = _Walker(root.require("binding"), "binding")
    binding = EngineBinding(
        search_page_url=binding_w.require_str("search_page_url"),
        input=_selector_from_json(binding_w.require("input"), "binding.input"),
        trigger=_opt(binding_w.optional("trigger"),
                     lambda r: _selector_from_json(r, "binding.trigger")),
        next_page=_opt(binding_w.optional("next_page"),
                       lambda r: _selector_from_json(r, "binding.next_page")),
        prev_page=_opt(binding_w.optional("prev_page"),
                       lambda r: _selector_from_json(r, "binding.prev_page")),
        reveal=_opt(binding_w.optional("reveal"),
                    lambda r: _selector_from_json(r, "binding.reveal")),
    )

    strategy_raw = root.optional("strategy")
    strategy = None
    if strategy_raw is not None:
        sw = _Walker(strategy_raw, "strategy")
        template_raw = sw.optional("request_template")
        template = None
        if template_raw is not None:
            tw = _Walker(template_raw, "strategy.request_template")
            template = RequestTemplate(
                method=tw.require_str("method"),
                url_template=tw.require_str("url_template"),
                static_params=_params_from_json(
                    tw.optional("static_params") or [],
                    "strategy.request_template.static_params"),
                response_kind=tw.require_str("response_kind"),
            )
        strategy = StrategyConfig(
            variant=sw.require_str("variant"),
            request_template=template,
            provider_id=sw.optional("provider_id"),
        )

    rs_w = _Walker(root.require("result_spec"), "result_spec")
    target_raw = rs_w.optional("target_url")
    result_spec = SearchResultSpec(
        type_name=rs_w.require_str("type_name"),
        container=_selector_from_json(rs_w.require("container"),
                                      "result_spec.container"),
        target_url=_opt(target_raw,
                        lambda r: _property_from_json(r, "result_spec.target_url")),
        properties=tuple(
            _property_from_json(p, f"result_spec.properties[{i}]")
            for i, p in enumerate(rs_w.require_list("properties"))
        ),
    )

    filters_raw = root.optional("filters") or {"groups": []}
    groups = []
    for gi, group_raw in enumerate(_Walker(filters_raw, "filters").require_list("groups")):
        gw = _Walker(group_raw, f"filters.groups[{gi}]")
        conditions = []
        for ci, cond_raw in enumerate(gw.require_list("conditions")):
            cw = _Walker(cond_raw, f"filters.groups[{gi}].conditions[{ci}]")
            conditions.append(Condition(
                name=cw.require_str("name"),
                activation=_modifier_from_json(
                    cw.require("activation"),
                    f"filters.groups[{gi}].conditions[{ci}].activation"),
            ))
        groups.append(ConditionGroup(
            group_name=gw.require_str("group_name"),
            exclusive=gw.require_bool("exclusive"),
            conditions=tuple(conditions),
        ))

    orderings = []
    for oi, ord_raw in enumerate(root.optional("orderings") or []):
        ow = _Walker(ord_raw, f"orderings[{oi}]")
        mode_raw = ow.require("mode")
        remote = None
        local = None
        if isinstance(mode_raw, dict) and "remote" in mode_raw:
            remote = _modifier_from_json(mode_raw["remote"],
                                         f"orderings[{oi}].mode.remote")
        elif isinstance(mode_raw, dict) and "local" in mode_raw:
            lw = _Walker(mode_raw["local"], f"orderings[{oi}].mode.local")
            local = LocalOrdering(
                property=lw.require_str("property"),
                direction=lw.require_str("direction"),
                comparator=lw.require_str("comparator"),
            )
        else:
            raise SpecParseError(f"bad ordering mode at orderings[{oi}].mode")
        orderings.append(OrderingSpec(name=ow.require_str("name"),
                                      remote=remote, local=local))

    metadata = ServiceMetadata(
        tags=tuple(meta.optional("tags") or ()),
        created=meta.optional("created") or "",
        format_version=version,
    )

    return ServiceSpec(
        id=root.require_str("id"),
        name=root.require_str("name"),
        binding=binding,
        strategy=strategy,
        result_spec=result_spec,
        filters=ConditionManager(tuple(groups)),
        orderings=tuple(orderings),
        metadata=metadata,
    )


def deserialize(text: str) -> ServiceSpec:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError(str(exc), line=exc.lineno, column=exc.colno) from exc
    if not isinstance(raw, dict):
        raise SpecParseError("spec text must be a JSON object")
    return spec_from_json_dict(raw)


# ---------------------------------------------------------------------------
# Bundles


@dataclass(frozen=True, slots=True)
class RejectedEntry:
    index: int
    name: str
    reason: str


@dataclass(frozen=True, slots=True)
class ImportResult:
    imported: tuple[ServiceSpec, ...]
    rejected: tuple[RejectedEntry, ...]

    def to_json(self) -> dict:
        return {
            "imported": [s.id for s in self.imported],
            "rejected": [
                {"index": r.index, "name": r.name, "reason": r.reason}
                for r in self.rejected
            ],
        }


def export_bundle(specs: list[ServiceSpec] | tuple[ServiceSpec, ...]) -> str:
    return canonical_json({
        "format_version": FORMAT_VERSION,
        "services": [spec_to_json_dict(s) for s in specs],
    })


def import_bundle(text: str, existing_ids=frozenset()) -> ImportResult:
    """Parse a bundle; invalid entries are rejected with reasons, colliding ids
    are regenerated and the name suffixed so nothing is silently overwritten."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError(str(exc), line=exc.lineno, column=exc.colno) from exc
    if not isinstance(raw, dict):
        raise SpecParseError("bundle text must be a JSON object")
    version = raw.get("format_version")
    if version != FORMAT_VERSION:
        raise VersionMismatchError(f"unsupported bundle format_version {version!r}")
    entries = raw.get("services")
    if not isinstance(entries, list):
        raise SpecParseError("missing field services in bundle")

    taken = set(existing_ids)
    imported: list[ServiceSpec] = []
    rejected: list[RejectedEntry] = []
    for i, entry in enumerate(entries):
        name = entry.get("name", "") if isinstance(entry, dict) else ""
        try:
            spec = spec_from_json_dict(entry)
        except (SpecParseError, VersionMismatchError) as exc:
            rejected.append(RejectedEntry(i, name, str(exc)))
            continue
        report = validate_spec(spec)
        if not report.ok:
            first = report.errors[0]
            rejected.append(RejectedEntry(
                i, spec.name, f"invalid spec: {first.path}: {first.message}"
            ))
            continue
        if spec.id in taken:
            spec = replace(spec, id=new_service_id(),
                           name=spec.name + " (imported)")
        taken.add(spec.id)
        imported.append(spec)
    return ImportResult(tuple(imported), tuple(rejected))
