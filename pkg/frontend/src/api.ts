import type {
  ArticleResponse,
  ConfigResponse,
  ExpansionSummary,
  FieldError,
  HealthResponse,
  Profile,
  SearchRequest,
  SearchResponse,
} from "./types.js";

export class ApiError extends Error {
  status: number;
  details: FieldError[];

  constructor(status: number, message: string, details: FieldError[] = []) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.details = details;
  }
}

// Thrown when a newer search replaces one still in flight.
export class SupersededError extends Error {
  constructor() {
    super("superseded by a newer search");
    this.name = "SupersededError";
  }
}

async function toApiError(response: Response): Promise<ApiError> {
  let body: unknown = null;
  try {
    body = await response.json();
  } catch {
    return new ApiError(response.status, `HTTP ${response.status}`);
  }
  if (body && typeof body === "object") {
    const record = body as Record<string, unknown>;
    if (Array.isArray(record["details"])) {
      return new ApiError(
        response.status,
        String(record["error"] ?? `HTTP ${response.status}`),
        record["details"] as FieldError[],
      );
    }
    if (typeof record["detail"] === "string") {
      return new ApiError(response.status, record["detail"]);
    }
  }
  return new ApiError(response.status, `HTTP ${response.status}`);
}

export class ApiClient {
  private baseUrl: string;
  private searchController: AbortController | null = null;

  constructor(baseUrl: string) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
  }

  private async getJson<T>(path: string): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`);
    if (!response.ok) {
      throw await toApiError(response);
    }
    return (await response.json()) as T;
  }

  private async postJson<T>(path: string, body: unknown, signal?: AbortSignal): Promise<T> {
    let response: Response;
    try {
      response = await fetch(`${this.baseUrl}${path}`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
        signal,
      });
    } catch (error) {
      if (error instanceof DOMException && error.name === "AbortError") {
        throw new SupersededError();
      }
      throw error;
    }
    if (!response.ok) {
      throw await toApiError(response);
    }
    return (await response.json()) as T;
  }

  health(): Promise<HealthResponse> {
    return this.getJson("/health");
  }

  config(): Promise<ConfigResponse> {
    return this.getJson("/config");
  }

  async expand(profile: Profile): Promise<ExpansionSummary> {
    const body = await this.postJson<{ expansion: ExpansionSummary }>("/expand", { profile });
    return body.expansion;
  }

  // At most one search is in flight; issuing a new one cancels the old,
  // whose caller sees SupersededError. The fetch-level abort is best
  // effort; the superseded promise rejects even where the runtime's
  // fetch ignores abort signals.
  search(request: SearchRequest): Promise<SearchResponse> {
    this.searchController?.abort();
    const controller = new AbortController();
    this.searchController = controller;
    const settle = this.postJson<SearchResponse>("/search", request, controller.signal).then(
      (response) => {
        if (controller.signal.aborted) throw new SupersededError();
        return response;
      },
      (error: unknown) => {
        if (controller.signal.aborted) throw new SupersededError();
        throw error;
      },
    );
    return settle.finally(() => {
      if (this.searchController === controller) {
        this.searchController = null;
      }
    });
  }

  article(pmid: string, terms: string[] = []): Promise<ArticleResponse> {
    const query = terms.map((t) => `terms=${encodeURIComponent(t)}`).join("&");
    const suffix = query ? `?${query}` : "";
    return this.getJson(`/article/${encodeURIComponent(pmid)}${suffix}`);
  }
}
