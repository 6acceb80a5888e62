/** Wire formats of the backend API, mirrored field-for-field. */

export type SelectorKind = "css" | "xpath";

export interface SelectorJson {
  kind: SelectorKind;
  expression: string;
  expect_many: boolean;
}

export interface SelectorSuggestionJson {
  selector: SelectorJson;
  match_count: number;
  specificity: "unique" | "generalized";
  rank: number;
}

export type ExtractJson = "text" | "inner_html" | { attribute: string };

export interface PropertySpecJson {
  name: string;
  location: "in_result" | "in_target";
  selector: SelectorJson;
  extract: ExtractJson;
}

export interface RequestModifierJson {
  url_override?: string;
  param_set?: [string, string][];
  path_suffix?: string;
}

export interface ConditionJson {
  name: string;
  activation: RequestModifierJson;
}

export interface ConditionGroupJson {
  group_name: string;
  exclusive: boolean;
  conditions: ConditionJson[];
}

export interface OrderingSpecJson {
  name: string;
  mode:
    | { remote: RequestModifierJson }
    | { local: { property: string; direction: "asc" | "desc"; comparator: string } };
}

export interface RequestTemplateJson {
  method: "GET" | "POST";
  url_template: string;
  static_params: [string, string][];
  response_kind: "full_document" | "html_fragment";
}

export interface StrategyConfigJson {
  variant: string;
  provider_id: string | null;
  request_template: RequestTemplateJson | null;
}

export interface ServiceSpecJson {
  id?: string;
  name: string;
  binding: {
    search_page_url: string;
    input: SelectorJson;
    trigger: SelectorJson | null;
    next_page: SelectorJson | null;
    prev_page: SelectorJson | null;
    reveal: SelectorJson | null;
  };
  strategy: StrategyConfigJson | null;
  result_spec: {
    type_name: string;
    container: SelectorJson;
    target_url: PropertySpecJson | null;
    properties: PropertySpecJson[];
  };
  filters: { groups: ConditionGroupJson[] };
  orderings: OrderingSpecJson[];
  metadata?: { tags: string[]; created: string; format_version: string };
}

export type PropertyValueJson = null | { text: string } | { url: string };

export interface DomainObjectJson {
  type: string;
  values: Record<string, PropertyValueJson>;
  target_url: string;
  provenance: { source_url: string; container_index: number; fetched_at: string };
}

export interface ResultSetJson {
  service_id: string;
  query: {
    keywords: string;
    active_filters: string[];
    active_ordering: string | null;
    page: number;
  };
  items: DomainObjectJson[];
  page: { page_index: number; has_next: boolean; has_prev: boolean };
}

export interface TableModelJson {
  kind: "table";
  columns: string[];
  rows: string[][];
  overflow: Record<string, string>[];
}

export interface SnapshotJson {
  snapshot_id: string;
  url: string;
  sanitized_html: string;
}

export interface VisualizerDescriptorJson {
  id: string;
  display_name: string;
  options_schema: { option_name: string; type: string; default?: unknown }[];
}

export function valueText(value: PropertyValueJson | undefined): string {
  if (!value) return "";
  if ("text" in value) return value.text;
  if ("url" in value) return value.url;
  return "";
}
