import { ApiClient } from "../src/api.js";
import { createApp, type App } from "../src/app.js";
import { applyFormState, type FormState } from "../src/form.js";
import type { SearchRequest, SearchResponse } from "../src/types.js";
import { BASE_URL } from "./config.js";

export type Harness = {
  root: HTMLElement;
  app: App;
  client: ApiClient;
  formPanel: HTMLElement;
  expansionPanel: HTMLElement;
  resultsPanel: HTMLElement;
};

export function mountApp(pageSize = 200, baseUrl = BASE_URL): Harness {
  const root = document.createElement("div");
  document.body.appendChild(root);
  const client = new ApiClient(baseUrl);
  const app = createApp(root, client, { pageSize });
  const panel = (selector: string): HTMLElement => {
    const node = root.querySelector<HTMLElement>(selector);
    if (!node) throw new Error(`missing panel: ${selector}`);
    return node;
  };
  return {
    root,
    app,
    client,
    formPanel: panel(".form-panel"),
    expansionPanel: panel(".expansion-panel"),
    resultsPanel: panel(".results-panel"),
  };
}

export function fillForm(harness: Harness, state: FormState): void {
  applyFormState(harness.formPanel, state);
}

// A search issued with plain fetch, bypassing the app, so parity checks
// compare the rendered page against an independent reading of the API.
export async function directSearch(request: SearchRequest): Promise<SearchResponse> {
  const response = await fetch(`${BASE_URL}/search`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(request),
  });
  if (!response.ok) {
    throw new Error(`direct search failed: HTTP ${response.status}`);
  }
  return (await response.json()) as SearchResponse;
}

export function pmids(response: SearchResponse): string[] {
  return response.items.map((item) => item.pmid);
}
