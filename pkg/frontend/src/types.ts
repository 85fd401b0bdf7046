// Request and response shapes of the pmr HTTP service.

export type GeneEntry = {
  name: string;
  variant?: string | null;
};

export type Profile = {
  disease: string;
  genes: (GeneEntry | string)[];
  age?: number | null;
  gender?: "male" | "female" | null;
  other?: string[];
};

// Partial overrides; omitted fields keep the server's configured values.
export type RankingOverrides = {
  k?: number;
  w_s?: number;
  w_h?: number;
  w_y?: number;
  h_axis?: number;
  y_axis?: number;
  c_h?: number;
  c_y?: number;
  formula_variant?: "additive" | "as_printed";
};

export type SearchRequest = {
  profile: Profile;
  params?: RankingOverrides;
  page_size?: number;
  offset?: number;
  keep_terms?: string[];
  use_labeler?: boolean;
  include_variants?: boolean;
  use_rerank?: boolean;
  demote_irrelevant?: boolean;
};

export type ResultItem = {
  pmid: string;
  title: string;
  journal: string;
  year: number;
  rank: number;
  score: number;
  r1: number;
  r2: number;
  label: string | null;
  sigma_h: number;
  sigma_y: number;
  matched_terms: string[];
};

export type GeneExpansion = {
  name: string;
  terms: string[];
  specified_variant: string | null;
  candidate_variants: string[];
};

export type ExpansionSummary = {
  disease: string;
  disease_terms: string[];
  genes: GeneExpansion[];
  drug_terms: string[];
  treatment_keywords: string[];
  age: number | null;
  gender: string | null;
  other: string[];
};

export type SearchResponse = {
  total: number;
  offset: number;
  items: ResultItem[];
  expansion: ExpansionSummary;
  timing_ms: number;
};

export type ArticleResponse = {
  article: {
    pmid: string;
    title: string;
    abstract: string;
    keywords: string[];
    mesh: string[];
    journal: string;
    year: number;
  };
  highlights: { term: string; fields: string[] }[];
};

export type HealthResponse = {
  status: string;
  articles: number;
};

export type ConfigResponse = {
  ranking: Required<RankingOverrides>;
  settings: {
    depth: number;
    use_labeler: boolean;
    include_variants: boolean;
    use_rerank: boolean;
    demote_irrelevant: boolean;
  };
  treatment_keywords: string[];
  has_model: boolean;
  articles: number;
};

export type FieldError = {
  field: string;
  message: string;
};
