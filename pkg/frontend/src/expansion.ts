import type { ExpansionSummary } from "./types.js";

// Vetting panel: every expanded term is a checkbox the clinician can
// untick before re-searching. Terms the server always keeps (the typed
// disease and gene names) render locked. Treatment keywords and other
// conditions are not restrictable, so they render as plain chips.

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

function termItem(term: string, locked: boolean, onChange: () => void): HTMLElement {
  const item = el("li", "term");
  const label = el("label");
  const box = document.createElement("input");
  box.type = "checkbox";
  box.checked = true;
  box.dataset["term"] = term;
  if (locked) {
    box.disabled = true;
    item.title = "always kept";
    item.classList.add("locked");
  } else {
    box.addEventListener("change", onChange);
  }
  label.appendChild(box);
  label.appendChild(document.createTextNode(` ${term}`));
  item.appendChild(label);
  return item;
}

function termGroup(
  heading: string,
  terms: string[],
  lockedTerms: Set<string>,
  onChange: () => void,
): HTMLElement {
  const group = el("div", "term-group");
  group.appendChild(el("h4", undefined, heading));
  const list = el("ul", "term-list");
  for (const term of terms) {
    list.appendChild(termItem(term, lockedTerms.has(term), onChange));
  }
  group.appendChild(list);
  return group;
}

function chipGroup(heading: string, texts: string[]): HTMLElement {
  const group = el("div", "term-group fixed");
  group.appendChild(el("h4", undefined, heading));
  const list = el("ul", "term-list");
  for (const text of texts) {
    list.appendChild(el("li", "term fixed-chip", text));
  }
  group.appendChild(list);
  return group;
}

export function renderExpansionPanel(
  container: HTMLElement,
  expansion: ExpansionSummary,
  onChange: () => void,
): void {
  container.innerHTML = "";
  container.appendChild(el("h3", undefined, "Expanded query terms"));
  container.appendChild(
    el("p", "hint", "Untick a term to repeat the search without it."),
  );

  const diseaseLocked = new Set([expansion.disease.trim().toLowerCase()]);
  container.appendChild(
    termGroup(`Disease: ${expansion.disease}`, expansion.disease_terms, diseaseLocked, onChange),
  );

  for (const gene of expansion.genes) {
    const locked = new Set([gene.name.trim().toLowerCase()]);
    const group = termGroup(`Gene: ${gene.name}`, gene.terms, locked, onChange);
    if (gene.specified_variant) {
      const pinned = el("p", "pinned-variant", `pinned variant: ${gene.specified_variant}`);
      group.appendChild(pinned);
    }
    if (gene.candidate_variants.length > 0) {
      group.appendChild(
        termGroup("candidate variants", gene.candidate_variants, new Set(), onChange),
      );
    }
    container.appendChild(group);
  }

  container.appendChild(termGroup("Drugs", expansion.drug_terms, new Set(), onChange));
  container.appendChild(chipGroup("Treatment keywords", expansion.treatment_keywords));
  if (expansion.other.length > 0) {
    container.appendChild(chipGroup("Other conditions", expansion.other));
  }
}

// The keep list for the next search: null when nothing was deselected,
// otherwise every term still ticked (locked ones included).
export function selectedTerms(container: HTMLElement): string[] | null {
  const kept: string[] = [];
  let anyUnchecked = false;
  for (const box of container.querySelectorAll<HTMLInputElement>("input[type=checkbox]")) {
    if (box.checked) {
      kept.push(box.dataset["term"] ?? "");
    } else {
      anyUnchecked = true;
    }
  }
  return anyUnchecked ? kept : null;
}
