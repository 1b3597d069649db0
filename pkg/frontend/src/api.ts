import type {
  EnginesPayload,
  SearchPayload,
  SearchRequest,
  SensesPayload,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function request<T>(input: string, init?: RequestInit): Promise<T> {
  const response = await fetch(input, init);
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = (await response.json()) as { error?: string };
      if (body.error) detail = body.error;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export function fetchSenses(term: string): Promise<SensesPayload> {
  return request<SensesPayload>(`/api/senses?term=${encodeURIComponent(term)}`);
}

export function fetchEngines(): Promise<EnginesPayload> {
  return request<EnginesPayload>("/api/engines");
}

export function postSearch(body: SearchRequest): Promise<SearchPayload> {
  return request<SearchPayload>("/api/search", {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
}
