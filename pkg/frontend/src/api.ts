// Thin typed client over the review API. The fetch implementation is
// injectable so tests can run against recorded responses.

import type {
  Candidate,
  Inconsistency,
  Page,
  Pattern,
  Progress,
  Report,
  VerdictBody,
} from './types.js';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
    readonly fields: string[] = [],
  ) {
    super(message);
    this.name = 'ApiError';
  }

  // status 0 means the request never reached the server
  get offline(): boolean {
    return this.status === 0;
  }
}

interface ErrorPayload {
  error?: { code?: string; message?: string; fields?: string[] };
}

export interface ListQuery {
  page?: number;
  size?: number;
  status?: string;
  pair?: string;
}

export class ReviewApi {
  constructor(
    private readonly base: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let resp: Response;
    try {
      resp = await this.fetchImpl(this.base + path, init);
    } catch (err) {
      throw new ApiError(0, `cannot reach ${this.base}: ${String(err)}`);
    }
    const body: unknown = await resp.json().catch(() => null);
    if (!resp.ok) {
      const detail = (body as ErrorPayload | null)?.error;
      throw new ApiError(
        resp.status,
        detail?.message ?? `HTTP ${resp.status}`,
        detail?.fields ?? [],
      );
    }
    return body as T;
  }

  private get<T>(path: string, query?: ListQuery): Promise<T> {
    const params = new URLSearchParams();
    for (const [key, value] of Object.entries(query ?? {})) {
      if (value !== undefined) params.set(key, String(value));
    }
    const qs = params.toString();
    return this.request<T>(qs ? `${path}?${qs}` : path);
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    });
  }

  health(): Promise<{ status: string; version: string }> {
    return this.get('/health');
  }

  patterns(): Promise<{ patterns: Pattern[] }> {
    return this.get('/patterns');
  }

  candidates(query?: ListQuery): Promise<Page<Candidate>> {
    return this.get('/candidates', query);
  }

  submitPairVerdict(
    id: string,
    body: VerdictBody,
  ): Promise<{ subject: string; status: string }> {
    return this.post(`/candidates/${id}/verdict`, body);
  }

  inconsistencies(query?: ListQuery): Promise<Page<Inconsistency>> {
    return this.get('/inconsistencies', query);
  }

  submitLabel(
    id: string,
    body: VerdictBody,
  ): Promise<{ subject: string; label: { verdict: string; pattern: string | null } | null }> {
    return this.post(`/inconsistencies/${id}/label`, body);
  }

  report(): Promise<Report> {
    return this.get('/report');
  }

  progress(): Promise<Progress> {
    return this.get('/progress');
  }
}
