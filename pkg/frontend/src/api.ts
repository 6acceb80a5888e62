/** Thin typed client for the backend; the studio's only network access. */

import type {
  ResultSetJson,
  SelectorSuggestionJson,
  ServiceSpecJson,
  SnapshotJson,
  StrategyConfigJson,
  TableModelJson,
  VisualizerDescriptorJson,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

export interface SearchPayload {
  keywords: string;
  filters?: string[];
  ordering?: string | null;
  page?: number;
  enrich?: boolean;
}

async function parseError(response: Response): Promise<ApiError> {
  let code = `http-${response.status}`;
  let message = response.statusText;
  try {
    const body = (await response.json()) as {
      error?: string;
      message?: string;
      problems?: { path: string; message: string }[];
    };
    if (body.error) code = body.error;
    if (body.message) message = body.message;
    else if (body.problems?.length) {
      message = body.problems
        .map((p) => `${p.path}: ${p.message}`)
        .join("; ");
    }
  } catch {
    // non-JSON error body: keep the status text
  }
  return new ApiError(response.status, code, message);
}

export class StudioApi {
  constructor(private readonly baseUrl: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) throw await parseError(response);
    if (response.status === 204) return undefined as T;
    return (await response.json()) as T;
  }

  fetchSnapshot(url: string): Promise<SnapshotJson> {
    return this.request("POST", "/fetch", { url });
  }

  suggestSelectors(
    snapshotId: string,
    nodePath: number[],
  ): Promise<SelectorSuggestionJson[]> {
    return this.request<{ suggestions: SelectorSuggestionJson[] }>(
      "POST",
      "/selectors/suggest",
      { snapshot_id: snapshotId, node_path: nodePath },
    ).then((body) => body.suggestions);
  }

  listServices(): Promise<ServiceSpecJson[]> {
    return this.request<{ services: ServiceSpecJson[] }>("GET", "/services").then(
      (body) => body.services,
    );
  }

  getService(id: string): Promise<ServiceSpecJson> {
    return this.request("GET", `/services/${id}`);
  }

  createService(spec: ServiceSpecJson): Promise<{ id: string; warnings: string[] }> {
    return this.request("POST", "/services", spec);
  }

  detectStrategy(
    id: string,
    probeA: string,
    probeB: string,
  ): Promise<StrategyConfigJson> {
    return this.request("POST", `/services/${id}/detect-strategy`, {
      probe_a: probeA,
      probe_b: probeB,
    });
  }

  search(id: string, payload: SearchPayload): Promise<ResultSetJson> {
    return this.request("POST", `/services/${id}/search`, {
      keywords: payload.keywords,
      filters: payload.filters ?? [],
      ordering: payload.ordering ?? null,
      page: payload.page ?? 1,
      enrich: payload.enrich ?? false,
    });
  }

  renderTable(
    id: string,
    payload: SearchPayload,
    options: Record<string, unknown> = {},
  ): Promise<TableModelJson> {
    return this.request("POST", `/services/${id}/render`, {
      keywords: payload.keywords,
      filters: payload.filters ?? [],
      ordering: payload.ordering ?? null,
      page: payload.page ?? 1,
      enrich: payload.enrich ?? false,
      visualizer_id: "table_of_properties",
      options,
    });
  }

  listVisualizers(): Promise<VisualizerDescriptorJson[]> {
    return this.request<{ visualizers: VisualizerDescriptorJson[] }>(
      "GET",
      "/visualizers",
    ).then((body) => body.visualizers);
  }
}
