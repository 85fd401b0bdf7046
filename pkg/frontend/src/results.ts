import type { ResultItem, SearchResponse } from "./types.js";

// Renders items exactly in response order. Ordering, filtering and
// scoring are the server's job; this module never sorts.

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function barRow(label: string, fraction: number, detail: string): HTMLElement {
  const row = el("div", "bar-row");
  row.appendChild(el("span", "bar-label", label));
  const track = el("div", "bar");
  const fill = el("div", "bar-fill");
  const width = Math.max(0, Math.min(1, fraction)) * 100;
  fill.style.width = `${width.toFixed(1)}%`;
  track.appendChild(fill);
  row.appendChild(track);
  row.appendChild(el("span", "bar-value", detail));
  return row;
}

function movedBadge(pmid: string, previousOrder: string[] | null, index: number): HTMLElement | null {
  if (previousOrder === null) return null;
  const before = previousOrder.indexOf(pmid);
  if (before === -1) {
    return el("span", "badge new-item", "new");
  }
  const delta = before - index;
  if (delta > 0) return el("span", "badge moved-up", `▲ ${delta}`);
  if (delta < 0) return el("span", "badge moved-down", `▼ ${-delta}`);
  return null;
}

function resultCard(
  item: ResultItem,
  index: number,
  maxScore: number,
  previousOrder: string[] | null,
): HTMLElement {
  const card = el("article", "result-card");
  card.dataset["pmid"] = item.pmid;

  const header = el("header", "result-header");
  header.appendChild(el("span", "result-rank", `#${item.rank}`));
  header.appendChild(el("span", "result-title", item.title));
  const badge = movedBadge(item.pmid, previousOrder, index);
  if (badge) header.appendChild(badge);
  if (item.label) {
    header.appendChild(el("span", `badge label-${item.label}`, item.label));
  }
  card.appendChild(header);

  const meta = el("p", "result-meta");
  const journal = item.journal || "unknown journal";
  const year = item.year > 0 ? String(item.year) : "year unknown";
  meta.textContent = `pmid ${item.pmid} · ${journal} · ${year} · bucket ${item.r1}`;
  card.appendChild(meta);

  const breakdown = el("div", "score-breakdown");
  breakdown.appendChild(
    barRow("score s", maxScore > 0 ? item.score / maxScore : 0, item.score.toFixed(3)),
  );
  breakdown.appendChild(barRow("σ(journal)", item.sigma_h, item.sigma_h.toFixed(3)));
  breakdown.appendChild(barRow("σ(year)", item.sigma_y, item.sigma_y.toFixed(3)));
  const within = el("p", "within-bucket", `within-bucket score r2 = ${item.r2.toFixed(4)}`);
  breakdown.appendChild(within);
  card.appendChild(breakdown);

  if (item.matched_terms.length > 0) {
    const terms = el("ul", "matched-terms");
    for (const term of item.matched_terms) {
      terms.appendChild(el("li", "matched-term", term));
    }
    card.appendChild(terms);
  }
  return card;
}

export function renderResults(
  container: HTMLElement,
  response: SearchResponse,
  previousOrder: string[] | null,
): void {
  container.innerHTML = "";
  if (response.items.length === 0) {
    container.appendChild(el("p", "empty-state", "No matching articles."));
    return;
  }
  const maxScore = Math.max(...response.items.map((item) => item.score));
  response.items.forEach((item, index) => {
    container.appendChild(resultCard(item, index, maxScore, previousOrder));
  });
}

// The pmid sequence currently on screen, top to bottom.
export function renderedOrder(container: HTMLElement): string[] {
  const order: string[] = [];
  for (const card of container.querySelectorAll<HTMLElement>("[data-pmid]")) {
    order.push(card.dataset["pmid"] ?? "");
  }
  return order;
}

export function renderPager(
  container: HTMLElement,
  response: SearchResponse,
  pageSize: number,
  onPage: (offset: number) => void,
): void {
  container.innerHTML = "";
  if (response.total === 0) return;

  const first = response.offset + 1;
  const last = response.offset + response.items.length;
  container.appendChild(
    el("span", "page-range", `${first}–${last} of ${response.total}`),
  );

  const prev = el("button", "page-prev", "Previous");
  prev.type = "button";
  prev.disabled = response.offset === 0;
  prev.addEventListener("click", () => {
    onPage(Math.max(0, response.offset - pageSize));
  });
  container.appendChild(prev);

  const next = el("button", "page-next", "Next");
  next.type = "button";
  next.disabled = response.offset + response.items.length >= response.total;
  next.addEventListener("click", () => {
    onPage(response.offset + pageSize);
  });
  container.appendChild(next);
}
