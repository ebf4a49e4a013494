import type { ApiErrorBody } from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Non-2xx API response, carrying the {code, message, param} envelope. */
export class ApiFailure extends Error {
  constructor(
    public readonly status: number,
    public readonly body: ApiErrorBody | null,
  ) {
    super(body?.message ?? `API error ${status}`);
    this.name = "ApiFailure";
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async getJson<T>(pathWithQuery: string): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + pathWithQuery, {
      headers: { accept: "application/json" },
    });
    if (!response.ok) {
      let body: ApiErrorBody | null = null;
      try {
        body = (await response.json()) as ApiErrorBody;
      } catch {
        body = null;
      }
      throw new ApiFailure(response.status, body);
    }
    return (await response.json()) as T;
  }
}
