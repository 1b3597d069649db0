// Shapes of the three service endpoints. The UI never computes scores;
// everything numeric shown on screen comes out of these payloads.

export interface SenseEntry {
  id: string;
  pos: string;
  ordinal: number;
  synonyms: string[];
  summary: string;
}

export interface SensesPayload {
  term: string;
  senses: SenseEntry[];
  all_option: boolean;
}

export interface EngineEntry {
  name: string;
  source_group: string;
  kind: string;
}

export interface EnginesPayload {
  engines: EngineEntry[];
}

export type SearchMode = "pre" | "post";

export interface SearchRequest {
  term: string;
  mode: SearchMode;
  sense: string; // sense id or "all"
  engine: string;
  limit?: number;
}

export interface Hit {
  url: string;
  title: string;
  snippet: string;
  rank: number;
}

export interface RankedRow {
  url: string;
  title: string;
  snippet: string;
  rank: number;
  fetch_status: string;
  token_count: number;
  scores: Record<string, number>;
  top_sense: string | null;
}

export interface SearchPayload {
  mode: string;
  term: string;
  sense: string;
  engine: string;
  executed_query: string;
  expansion?: { relation: string; terms: string[] };
  hits?: Hit[];
  sense_ids?: string[];
  order_key?: string;
  rows?: RankedRow[];
}

export const ALL_SENSES = "all";
export const BEST_COLUMN = "best";
