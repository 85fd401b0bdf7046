import type { FieldError, Profile, RankingOverrides } from "./types.js";

export type GeneRow = { name: string; variant: string };

export type WeightState = { k: number; wS: number; wH: number; wY: number };

export type FormState = {
  disease: string;
  genes: GeneRow[];
  age: string;
  gender: "" | "male" | "female";
  other: string[];
  weights: WeightState;
};

export const WEIGHT_BOUNDS = {
  k: { min: 1, max: 100, step: 1 },
  w: { min: 0, max: 5, step: 0.1 },
} as const;

export const DEFAULT_WEIGHTS: WeightState = { k: 20, wS: 1, wH: 1, wY: 1 };

export function defaultFormState(): FormState {
  return {
    disease: "",
    genes: [{ name: "", variant: "" }],
    age: "",
    gender: "",
    other: [],
    weights: { ...DEFAULT_WEIGHTS },
  };
}

function clamp(value: number, min: number, max: number): number {
  if (!Number.isFinite(value)) return min;
  return Math.min(max, Math.max(min, value));
}

export function clampWeights(weights: WeightState): WeightState {
  const { k, w } = WEIGHT_BOUNDS;
  return {
    k: clamp(weights.k, k.min, k.max),
    wS: clamp(weights.wS, w.min, w.max),
    wH: clamp(weights.wH, w.min, w.max),
    wY: clamp(weights.wY, w.min, w.max),
  };
}

export function formValid(state: FormState): boolean {
  return state.disease.trim() !== "" && state.genes.some((g) => g.name.trim() !== "");
}

export function toProfile(state: FormState): Profile {
  const genes = state.genes
    .filter((g) => g.name.trim() !== "")
    .map((g) => ({
      name: g.name.trim(),
      variant: g.variant.trim() === "" ? null : g.variant.trim(),
    }));
  const age = state.age.trim() === "" ? null : Number(state.age);
  return {
    disease: state.disease.trim(),
    genes,
    age,
    gender: state.gender === "" ? null : state.gender,
    other: [...state.other],
  };
}

export function toParams(weights: WeightState): RankingOverrides {
  return { k: weights.k, w_s: weights.wS, w_h: weights.wH, w_y: weights.wY };
}

export function serializeForm(state: FormState): string {
  return JSON.stringify(state);
}

export function deserializeForm(text: string): FormState {
  const raw = JSON.parse(text) as Record<string, unknown>;
  if (typeof raw !== "object" || raw === null) {
    throw new Error("form state must be an object");
  }
  const genes = Array.isArray(raw["genes"]) ? raw["genes"] : [];
  const other = Array.isArray(raw["other"]) ? raw["other"] : [];
  const weights = (raw["weights"] ?? {}) as Record<string, unknown>;
  const gender = raw["gender"];
  const state: FormState = {
    disease: String(raw["disease"] ?? ""),
    genes: genes.map((g) => {
      const row = (g ?? {}) as Record<string, unknown>;
      return { name: String(row["name"] ?? ""), variant: String(row["variant"] ?? "") };
    }),
    age: String(raw["age"] ?? ""),
    gender: gender === "male" || gender === "female" ? gender : "",
    other: other.map((o) => String(o)),
    weights: clampWeights({
      k: Number(weights["k"] ?? DEFAULT_WEIGHTS.k),
      wS: Number(weights["wS"] ?? DEFAULT_WEIGHTS.wS),
      wH: Number(weights["wH"] ?? DEFAULT_WEIGHTS.wH),
      wY: Number(weights["wY"] ?? DEFAULT_WEIGHTS.wY),
    }),
  };
  if (state.genes.length === 0) {
    state.genes.push({ name: "", variant: "" });
  }
  return state;
}

type SliderSpec = { id: string; label: string; min: number; max: number; step: number };

const SLIDERS: SliderSpec[] = [
  { id: "k", label: "bucket width k", ...WEIGHT_BOUNDS.k },
  { id: "ws", label: "score weight", ...WEIGHT_BOUNDS.w },
  { id: "wh", label: "journal impact weight", ...WEIGHT_BOUNDS.w },
  { id: "wy", label: "recency weight", ...WEIGHT_BOUNDS.w },
];

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

function fieldWrap(name: string, labelText: string, input: HTMLElement): HTMLElement {
  const wrap = el("div", "field");
  wrap.dataset["field"] = name;
  const label = el("label", undefined, labelText);
  label.appendChild(input);
  wrap.appendChild(label);
  const error = el("span", "field-error");
  error.hidden = true;
  wrap.appendChild(error);
  return wrap;
}

export type FormCallbacks = {
  onSubmit: () => void;
  onApplyWeights: () => void;
};

export function renderForm(container: HTMLElement, callbacks: FormCallbacks): void {
  container.innerHTML = "";
  const form = el("form", "profile-form");
  form.addEventListener("submit", (event) => event.preventDefault());

  const disease = el("input");
  disease.id = "disease";
  disease.placeholder = "e.g. Lung adenocarcinoma";
  form.appendChild(fieldWrap("disease", "Disease", disease));

  const genesWrap = el("div", "field");
  genesWrap.dataset["field"] = "genes";
  genesWrap.appendChild(el("span", "field-label", "Genes"));
  const geneRows = el("div", "gene-rows");
  genesWrap.appendChild(geneRows);
  const geneError = el("span", "field-error");
  geneError.hidden = true;
  genesWrap.appendChild(geneError);
  const addGene = el("button", "add-gene", "+ gene");
  addGene.type = "button";
  addGene.addEventListener("click", () => {
    geneRows.appendChild(buildGeneRow(container, { name: "", variant: "" }));
  });
  genesWrap.appendChild(addGene);
  form.appendChild(genesWrap);
  geneRows.appendChild(buildGeneRow(container, { name: "", variant: "" }));

  const age = el("input");
  age.id = "age";
  age.type = "number";
  age.min = "0";
  age.max = "130";
  form.appendChild(fieldWrap("age", "Age", age));

  const gender = el("select");
  gender.id = "gender";
  for (const [value, text] of [
    ["", "unspecified"],
    ["female", "female"],
    ["male", "male"],
  ] as const) {
    const option = el("option", undefined, text);
    option.value = value;
    gender.appendChild(option);
  }
  form.appendChild(fieldWrap("gender", "Gender", gender));

  const otherWrap = el("div", "field");
  otherWrap.dataset["field"] = "other";
  otherWrap.appendChild(el("span", "field-label", "Other conditions"));
  const chips = el("ul", "chips");
  otherWrap.appendChild(chips);
  const otherInput = el("input");
  otherInput.id = "other-input";
  otherInput.placeholder = "condition";
  const addOther = el("button", "add-other", "Add");
  addOther.type = "button";
  const commitChip = () => {
    const text = otherInput.value.trim();
    if (!text) return;
    chips.appendChild(buildChip(text));
    otherInput.value = "";
  };
  addOther.addEventListener("click", commitChip);
  otherInput.addEventListener("keydown", (event) => {
    if (event.key === "Enter") {
      event.preventDefault();
      commitChip();
    }
  });
  otherWrap.appendChild(otherInput);
  otherWrap.appendChild(addOther);
  form.appendChild(otherWrap);

  const sliders = el("fieldset", "weights");
  sliders.appendChild(el("legend", undefined, "Ranking weights"));
  for (const spec of SLIDERS) {
    const slider = el("input");
    slider.id = `slider-${spec.id}`;
    slider.type = "range";
    slider.min = String(spec.min);
    slider.max = String(spec.max);
    slider.step = String(spec.step);
    const output = el("output");
    output.id = `slider-${spec.id}-value`;
    slider.addEventListener("input", () => {
      output.textContent = slider.value;
    });
    const wrap = fieldWrap(`slider-${spec.id}`, spec.label, slider);
    wrap.appendChild(output);
    sliders.appendChild(wrap);
  }
  const apply = el("button", "apply-weights", "Re-rank");
  apply.type = "button";
  apply.disabled = true;
  apply.addEventListener("click", callbacks.onApplyWeights);
  sliders.appendChild(apply);
  form.appendChild(sliders);

  const submit = el("button", "submit-search", "Search");
  submit.type = "submit";
  submit.disabled = true;
  submit.addEventListener("click", () => {
    if (!submit.disabled) callbacks.onSubmit();
  });
  form.appendChild(submit);

  form.addEventListener("input", () => updateSubmitState(container));
  container.appendChild(form);
  applyFormState(container, defaultFormState());
}

function buildGeneRow(container: HTMLElement, row: GeneRow): HTMLElement {
  const wrap = el("div", "gene-row");
  const name = el("input", "gene-name");
  name.placeholder = "gene";
  name.value = row.name;
  const variant = el("input", "gene-variant");
  variant.placeholder = "variant (optional)";
  variant.value = row.variant;
  const remove = el("button", "gene-remove", "×");
  remove.type = "button";
  remove.addEventListener("click", () => {
    const rows = wrap.parentElement;
    wrap.remove();
    if (rows && rows.children.length === 0) {
      rows.appendChild(buildGeneRow(container, { name: "", variant: "" }));
    }
    updateSubmitState(container);
  });
  wrap.appendChild(name);
  wrap.appendChild(variant);
  wrap.appendChild(remove);
  return wrap;
}

function buildChip(text: string): HTMLElement {
  const chip = el("li", "chip");
  chip.appendChild(el("span", "chip-text", text));
  const remove = el("button", "chip-remove", "×");
  remove.type = "button";
  remove.addEventListener("click", () => chip.remove());
  chip.appendChild(remove);
  return chip;
}

function query<T extends Element>(container: HTMLElement, selector: string): T {
  const node = container.querySelector<T>(selector);
  if (!node) throw new Error(`form element missing: ${selector}`);
  return node;
}

function sliderValue(container: HTMLElement, id: string): number {
  return Number(query<HTMLInputElement>(container, `#slider-${id}`).value);
}

export function readFormState(container: HTMLElement): FormState {
  const genes: GeneRow[] = [];
  for (const row of container.querySelectorAll(".gene-row")) {
    genes.push({
      name: row.querySelector<HTMLInputElement>(".gene-name")?.value ?? "",
      variant: row.querySelector<HTMLInputElement>(".gene-variant")?.value ?? "",
    });
  }
  const other: string[] = [];
  for (const chip of container.querySelectorAll(".chip-text")) {
    other.push(chip.textContent ?? "");
  }
  const genderValue = query<HTMLSelectElement>(container, "#gender").value;
  return {
    disease: query<HTMLInputElement>(container, "#disease").value,
    genes: genes.length > 0 ? genes : [{ name: "", variant: "" }],
    age: query<HTMLInputElement>(container, "#age").value,
    gender: genderValue === "male" || genderValue === "female" ? genderValue : "",
    other,
    weights: clampWeights({
      k: sliderValue(container, "k"),
      wS: sliderValue(container, "ws"),
      wH: sliderValue(container, "wh"),
      wY: sliderValue(container, "wy"),
    }),
  };
}

export function applyFormState(container: HTMLElement, state: FormState): void {
  query<HTMLInputElement>(container, "#disease").value = state.disease;

  const geneRows = query<HTMLElement>(container, ".gene-rows");
  geneRows.innerHTML = "";
  const rows = state.genes.length > 0 ? state.genes : [{ name: "", variant: "" }];
  for (const row of rows) {
    geneRows.appendChild(buildGeneRow(container, row));
  }

  query<HTMLInputElement>(container, "#age").value = state.age;
  query<HTMLSelectElement>(container, "#gender").value = state.gender;

  const chips = query<HTMLElement>(container, ".chips");
  chips.innerHTML = "";
  for (const text of state.other) {
    chips.appendChild(buildChip(text));
  }

  const weights = clampWeights(state.weights);
  const pairs: [string, number][] = [
    ["k", weights.k],
    ["ws", weights.wS],
    ["wh", weights.wH],
    ["wy", weights.wY],
  ];
  for (const [id, value] of pairs) {
    const slider = query<HTMLInputElement>(container, `#slider-${id}`);
    slider.value = String(value);
    query<HTMLOutputElement>(container, `#slider-${id}-value`).textContent = slider.value;
  }

  updateSubmitState(container);
}

export function updateSubmitState(container: HTMLElement): void {
  const valid = formValid(readFormState(container));
  query<HTMLButtonElement>(container, ".submit-search").disabled = !valid;
}

export function setRerankEnabled(container: HTMLElement, enabled: boolean): void {
  query<HTMLButtonElement>(container, ".apply-weights").disabled = !enabled;
}

// Routes server-side validation details onto the matching inputs; details
// that fit no field are returned for the caller's banner.
export function showFieldErrors(container: HTMLElement, details: FieldError[]): FieldError[] {
  const unmatched: FieldError[] = [];
  for (const detail of details) {
    const name = fieldForPath(detail.field);
    const wrap = name
      ? container.querySelector<HTMLElement>(`[data-field="${name}"]`)
      : null;
    const slot = wrap?.querySelector<HTMLElement>(".field-error");
    if (slot) {
      slot.textContent = detail.message;
      slot.hidden = false;
    } else {
      unmatched.push(detail);
    }
  }
  return unmatched;
}

export function clearFieldErrors(container: HTMLElement): void {
  for (const slot of container.querySelectorAll<HTMLElement>(".field-error")) {
    slot.textContent = "";
    slot.hidden = true;
  }
}

function fieldForPath(path: string): string | null {
  const parts = path.split(".");
  if (parts[0] === "profile" && parts.length >= 2) {
    const field = parts[1];
    if (field === "disease" || field === "age" || field === "gender") return field;
    if (field === "genes") return "genes";
    if (field === "other") return "other";
    return null;
  }
  if (parts[0] === "params" && parts.length === 2) {
    const param = parts[1];
    if (param === "k") return "slider-k";
    if (param === "w_s") return "slider-ws";
    if (param === "w_h") return "slider-wh";
    if (param === "w_y") return "slider-wy";
    return null;
  }
  return null;
}
