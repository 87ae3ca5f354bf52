// Thin typed client for the /api/v1 endpoints.

import type {
  ApiErrorBody,
  Classification,
  Decision,
  RawAnswer,
  ServerConfig,
  SessionView,
  ArtifactView,
} from './types.js';

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let body: ApiErrorBody | null = null;
  try {
    body = (await response.json()) as ApiErrorBody;
  } catch {
    // non-JSON error body; fall through to a generic error
  }
  return new ApiError(
    response.status,
    body?.code ?? `http_${response.status}`,
    body?.message ?? response.statusText,
  );
}

export class ApiClient {
  constructor(private readonly base: string = '') {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(`${this.base}/api/v1${path}`, {
      method,
      headers: body === undefined ? undefined : { 'Content-Type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      throw await parseError(response);
    }
    return (await response.json()) as T;
  }

  getConfig(): Promise<ServerConfig> {
    return this.request('GET', '/config');
  }

  createSession(sessionId?: string, artifacts?: string[]): Promise<SessionView> {
    return this.request('POST', '/sessions', { session_id: sessionId ?? null, artifacts: artifacts ?? [] });
  }

  getSession(sessionId: string): Promise<SessionView> {
    return this.request('GET', `/sessions/${encodeURIComponent(sessionId)}`);
  }

  postScores(
    sessionId: string,
    artifactId: string,
    participantId: string,
    answers: Record<string, RawAnswer>,
    version: number,
  ): Promise<ArtifactView> {
    return this.request(
      'POST',
      `/sessions/${encodeURIComponent(sessionId)}/artifacts/${encodeURIComponent(artifactId)}/scores`,
      { participant_id: participantId, answers, version },
    );
  }

  putConsensus(
    sessionId: string,
    artifactId: string,
    answers: Record<string, RawAnswer>,
    version: number,
  ): Promise<ArtifactView> {
    return this.request(
      'PUT',
      `/sessions/${encodeURIComponent(sessionId)}/artifacts/${encodeURIComponent(artifactId)}/consensus`,
      { answers, version },
    );
  }

  classification(sessionId: string, artifactId: string): Promise<Classification> {
    return this.request(
      'GET',
      `/sessions/${encodeURIComponent(sessionId)}/artifacts/${encodeURIComponent(artifactId)}/classification`,
    );
  }

  /** Stateless what-if preview; never touches stored answers. */
  preview(sessionId: string, artifactId: string, bi: number, cc: number): Promise<Classification> {
    const query = `bi=${encodeURIComponent(bi)}&cc=${encodeURIComponent(cc)}`;
    return this.request(
      'GET',
      `/sessions/${encodeURIComponent(sessionId)}/artifacts/${encodeURIComponent(artifactId)}/classification?${query}`,
    );
  }

  finalizeDecision(artifactId: string, sessionId: string, rationale = ''): Promise<Decision> {
    return this.request('POST', `/decisions/${encodeURIComponent(artifactId)}/finalize`, {
      session_id: sessionId,
      rationale,
    });
  }
}
