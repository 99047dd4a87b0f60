// Thin typed client over fetch.  The fetch function is injectable so tests
// can replay recorded service responses.

import type {
  DomainDoc,
  JobView,
  MechanicDoc,
  ServiceError,
  SessionView,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async call<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json();
    if (!response.ok) {
      const error = payload as ServiceError;
      throw new ApiError(response.status, error.code ?? "error", error.message ?? "request failed");
    }
    return payload as T;
  }

  uploadDomain(document: unknown): Promise<{ id: string; ok: boolean }> {
    return this.call("POST", "/domains", document);
  }

  getDomain(id: string): Promise<{ id: string; document: DomainDoc }> {
    return this.call("GET", `/domains/${id}`);
  }

  startGeneration(domainId: string): Promise<JobView> {
    return this.call("POST", "/jobs", { domain_id: domainId });
  }

  startAdaptation(domainId: string, seed: MechanicDoc[], overlay: unknown): Promise<JobView> {
    return this.call("POST", "/adapt", {
      domain_id: domainId,
      seed_mechanics: seed,
      overlay,
    });
  }

  getJob(id: string): Promise<JobView> {
    return this.call("GET", `/jobs/${id}`);
  }

  openSession(domainId: string, mechanics: MechanicDoc[]): Promise<SessionView> {
    return this.call("POST", "/sessions", { domain_id: domainId, mechanics });
  }

  getSession(id: string): Promise<SessionView> {
    return this.call("GET", `/sessions/${id}`);
  }

  act(sessionId: string, agent: string, action: number | string): Promise<SessionView> {
    return this.call("POST", `/sessions/${sessionId}/act`, { agent, action });
  }

  reset(sessionId: string): Promise<SessionView> {
    return this.call("POST", `/sessions/${sessionId}/reset`);
  }
}
