/**
 * Typed client for the fontpair query service.
 *
 * Scores are passed through exactly as the service returns them; nothing is
 * recomputed or reordered on this side.
 */

export interface Recommendation {
  font_id: string;
  score: number;
}

export interface ComparisonPayload {
  header: string;
  follower_a: string;
  follower_b: string;
  choice: string; // "a" | "b" | an explicit follower id
}

export type FontRole = "header" | "follower";

export class ServiceError extends Error {
  constructor(message: string, readonly status?: number) {
    super(message);
    this.name = "ServiceError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly fetchFn: FetchLike;

  constructor(readonly baseUrl: string, fetchFn?: FetchLike) {
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    let response: Response;
    try {
      response = await this.fetchFn(this.url(path), init);
    } catch (err) {
      throw new ServiceError(`service unreachable: ${String(err)}`);
    }
    let body: unknown = null;
    try {
      body = await response.json();
    } catch {
      // non-JSON body; fall through with null
    }
    if (!response.ok) {
      const detail =
        body && typeof body === "object" && "error" in body
          ? String((body as { error: unknown }).error)
          : response.statusText;
      throw new ServiceError(detail, response.status);
    }
    return body;
  }

  async fonts(role: FontRole): Promise<string[]> {
    const body = (await this.request(`/fonts?role=${role}`)) as { fonts: string[] };
    return body.fonts;
  }

  async recommend(header: string, method: string, n: number): Promise<Recommendation[]> {
    const query = `/recommend?header=${encodeURIComponent(header)}` +
      `&method=${encodeURIComponent(method)}&n=${n}`;
    const body = (await this.request(query)) as { recommendations: Recommendation[] };
    return body.recommendations;
  }

  async score(header: string, follower: string, method: string): Promise<number> {
    const query = `/score?header=${encodeURIComponent(header)}` +
      `&follower=${encodeURIComponent(follower)}&method=${encodeURIComponent(method)}`;
    const body = (await this.request(query)) as { score: number };
    return body.score;
  }

  async postComparison(payload: ComparisonPayload): Promise<void> {
    await this.request("/comparisons", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }
}
