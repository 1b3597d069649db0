import type { SearchMode, SearchPayload, SenseEntry } from "./types.js";
import { ALL_SENSES, BEST_COLUMN } from "./types.js";

export interface UiState {
  term: string;
  senses: SenseEntry[] | null; // null until fetched for the current term
  choice: string | null; // sense id or "all"; null until the picker is up
  mode: SearchMode;
  engine: string;
  response: SearchPayload | null;
  sortColumn: string; // sense id or "best"
  error: string | null;
  busy: boolean;
}

export function initialState(): UiState {
  return {
    term: "",
    senses: null,
    choice: null,
    mode: "pre",
    engine: "",
    response: null,
    sortColumn: BEST_COLUMN,
    error: null,
    busy: false,
  };
}

export function searchEnabled(state: UiState): boolean {
  return state.term.trim() !== "" && state.choice !== null && state.engine !== "";
}

export function sensesLoaded(state: UiState, senses: SenseEntry[]): UiState {
  // "return all senses" is always offered and starts selected
  return { ...state, senses, choice: ALL_SENSES, error: null };
}

export function validSortColumns(state: UiState): string[] {
  const ids = state.response?.sense_ids ?? [];
  return [BEST_COLUMN, ...ids];
}

export function withResponse(state: UiState, response: SearchPayload): UiState {
  const sortColumn = response.order_key ?? BEST_COLUMN;
  return { ...state, response, sortColumn, error: null, busy: false };
}

export function withSortColumn(state: UiState, column: string): UiState {
  if (!validSortColumns(state).includes(column)) {
    return state;
  }
  return { ...state, sortColumn: column };
}

/**
 * Discards responses of superseded requests: each issue() gets a ticket,
 * and only the newest ticket is allowed to land.
 */
export class RequestSequencer {
  private latest = 0;

  issue(): number {
    this.latest += 1;
    return this.latest;
  }

  isCurrent(ticket: number): boolean {
    return ticket === this.latest;
  }
}
