import type { FormState } from "../src/form.js";
import { DEFAULT_WEIGHTS } from "../src/form.js";

// Five patient profiles covering the fixture corpus: pinned and unpinned
// variants, each gender plus unspecified, and other-condition chips.
export const FIXTURE_FORMS: { name: string; state: FormState }[] = [
  {
    name: "lung adenocarcinoma, KRAS G12C, 61F",
    state: {
      disease: "Lung adenocarcinoma",
      genes: [{ name: "KRAS", variant: "G12C" }],
      age: "61",
      gender: "female",
      other: ["Hypertension"],
      weights: { ...DEFAULT_WEIGHTS },
    },
  },
  {
    name: "melanoma, BRAF V600E, 45M",
    state: {
      disease: "Melanoma",
      genes: [{ name: "BRAF", variant: "V600E" }],
      age: "45",
      gender: "male",
      other: [],
      weights: { ...DEFAULT_WEIGHTS },
    },
  },
  {
    name: "gastric cancer, ERBB2",
    state: {
      disease: "Gastric cancer",
      genes: [{ name: "ERBB2", variant: "" }],
      age: "72",
      gender: "",
      other: ["Diabetes"],
      weights: { ...DEFAULT_WEIGHTS },
    },
  },
  {
    name: "lung cancer, KRAS unpinned",
    state: {
      disease: "Lung cancer",
      genes: [{ name: "KRAS", variant: "" }],
      age: "",
      gender: "",
      other: [],
      weights: { ...DEFAULT_WEIGHTS },
    },
  },
  {
    name: "stomach cancer, HER2, 60F",
    state: {
      disease: "Stomach cancer",
      genes: [{ name: "HER2", variant: "" }],
      age: "60",
      gender: "female",
      other: ["Diabetes"],
      weights: { ...DEFAULT_WEIGHTS },
    },
  },
];
