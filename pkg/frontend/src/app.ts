import { ApiClient, ApiError, SupersededError } from "./api.js";
import { renderExpansionPanel, selectedTerms } from "./expansion.js";
import {
  clearFieldErrors,
  formValid,
  readFormState,
  renderForm,
  setRerankEnabled,
  showFieldErrors,
  toParams,
  toProfile,
} from "./form.js";
import { renderedOrder, renderPager, renderResults } from "./results.js";
import type { SearchResponse } from "./types.js";

export type App = {
  submit: () => Promise<void>;
  applyWeights: () => Promise<void>;
  goToPage: (offset: number) => Promise<void>;
  lastResponse: () => SearchResponse | null;
};

type AppOptions = {
  pageSize?: number;
};

export function createApp(root: HTMLElement, client: ApiClient, options: AppOptions = {}): App {
  const pageSize = options.pageSize ?? 10;

  root.innerHTML = "";
  const banner = document.createElement("div");
  banner.className = "banner";
  banner.hidden = true;
  root.appendChild(banner);

  const layout = document.createElement("div");
  layout.className = "layout";
  root.appendChild(layout);

  const formPanel = document.createElement("section");
  formPanel.className = "form-panel";
  const expansionPanel = document.createElement("section");
  expansionPanel.className = "expansion-panel";
  const resultsPanel = document.createElement("section");
  resultsPanel.className = "results-panel";
  layout.appendChild(formPanel);
  layout.appendChild(expansionPanel);
  layout.appendChild(resultsPanel);

  const status = document.createElement("p");
  status.className = "status-line";
  const results = document.createElement("div");
  results.className = "results";
  const pager = document.createElement("div");
  pager.className = "pager";
  resultsPanel.appendChild(status);
  resultsPanel.appendChild(results);
  resultsPanel.appendChild(pager);

  let lastResponse: SearchResponse | null = null;
  let lastOrder: { order: string[]; offset: number } | null = null;
  let offset = 0;
  // Stale async flows (an older submit resolving late) must not render.
  let flowSeq = 0;

  function clearErrors(): void {
    clearFieldErrors(formPanel);
    banner.hidden = true;
    banner.textContent = "";
  }

  function showErrors(error: unknown): void {
    if (error instanceof ApiError) {
      const unmatched = showFieldErrors(formPanel, error.details);
      if (unmatched.length > 0 || error.details.length === 0) {
        const extra = unmatched.map((d) => `${d.field}: ${d.message}`).join("; ");
        banner.textContent = extra ? `${error.message} (${extra})` : error.message;
        banner.hidden = false;
      }
      return;
    }
    banner.textContent = error instanceof Error ? error.message : "request failed";
    banner.hidden = false;
  }

  async function runSearch(withBadges: boolean): Promise<void> {
    const seq = ++flowSeq;
    clearErrors();
    const state = readFormState(formPanel);
    const keep = selectedTerms(expansionPanel);
    const request = {
      profile: toProfile(state),
      params: toParams(state.weights),
      page_size: pageSize,
      offset,
      ...(keep !== null ? { keep_terms: keep } : {}),
    };
    let response: SearchResponse;
    try {
      response = await client.search(request);
    } catch (error) {
      if (error instanceof SupersededError) return;
      if (seq === flowSeq) showErrors(error);
      return;
    }
    if (seq !== flowSeq) return;

    const previousOrder =
      withBadges && lastOrder && lastOrder.offset === offset ? lastOrder.order : null;
    renderResults(results, response, previousOrder);
    renderPager(pager, response, pageSize, (nextOffset) => {
      void goToPage(nextOffset);
    });
    status.textContent = `${response.total} matches · ${response.timing_ms.toFixed(1)} ms`;
    lastResponse = response;
    lastOrder = { order: renderedOrder(results), offset };
    setRerankEnabled(formPanel, true);
  }

  async function submit(): Promise<void> {
    const seq = ++flowSeq;
    clearErrors();
    const state = readFormState(formPanel);
    if (!formValid(state)) return;
    try {
      const expansion = await client.expand(toProfile(state));
      if (seq !== flowSeq) return;
      renderExpansionPanel(expansionPanel, expansion, () => {
        offset = 0;
        void runSearch(true);
      });
    } catch (error) {
      if (seq === flowSeq) showErrors(error);
      return;
    }
    offset = 0;
    lastOrder = null;
    await runSearch(false);
  }

  async function applyWeights(): Promise<void> {
    if (lastResponse === null) return;
    await runSearch(true);
  }

  async function goToPage(nextOffset: number): Promise<void> {
    offset = nextOffset;
    await runSearch(false);
  }

  renderForm(formPanel, {
    onSubmit: () => {
      void submit();
    },
    onApplyWeights: () => {
      void applyWeights();
    },
  });

  return {
    submit,
    applyWeights,
    goToPage,
    lastResponse: () => lastResponse,
  };
}
