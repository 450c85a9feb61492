/** Typed client for the map/session/assessment HTTP API. */

export interface PromptInfo {
  id: string;
  text: string;
  shape: string;
  subjects: string[];
  phase: string;
}

export interface BandInfo {
  index: number;
  role: string;
  count: number;
}

export interface LayoutNode {
  id: string;
  kind: string;
  label: string;
  band: number;
  order: number;
  x: number;
  y: number;
}

export interface LayoutEdge {
  id: string;
  src: string;
  dst: string;
  kind: string;
  sign: string | null;
  saturated: boolean;
  statement: string;
}

export interface MapLayout {
  version: number;
  band_count: number;
  bands: BandInfo[];
  width: number;
  height: number;
  nodes: LayoutNode[];
  edges: LayoutEdge[];
}

export interface HypothesisRow {
  id: string;
  edge_id: string;
  kind: string;
  generated_text: string;
  edited_text: string | null;
  stale: boolean;
  status: string;
  risk: string | null;
}

export interface AnswerResponse {
  deltas: Record<string, unknown>[];
  prompt: PromptInfo | null;
  phase: string;
}

export interface FinishResponse {
  map_id: string;
  hypotheses: HypothesisRow[];
  warnings: { code: string; edges: { id: string; statement: string }[] }[];
}

export interface SummaryCells {
  [kind: string]: {
    [status: string]: { low: number; medium: number; high: number; total: number };
  };
}

export interface SummaryTable {
  cells: SummaryCells;
  unassessed: Record<string, number>;
  refuted: Record<string, number>;
  kind_totals: Record<string, number>;
  total: number;
}

export interface EvidenceEntry {
  source: string;
  note?: string;
  date?: string;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function unwrap<T>(response: Response): Promise<T> {
  const body = await response.json().catch(() => ({}));
  if (!response.ok) {
    throw new ApiError(
      response.status,
      (body as { code?: string }).code ?? 'HttpError',
      (body as { message?: string }).message ?? response.statusText,
    );
  }
  return body as T;
}

const SESSION_KEY = 'hymap-session';

export class ApiClient {
  private sessionId: string | null = null;
  private token: string | null = null;

  constructor(private base: string) {}

  /** Reattach to a session persisted by a previous page load, if any. */
  resume(): boolean {
    try {
      const raw = window.localStorage.getItem(SESSION_KEY);
      if (!raw) return false;
      const stored = JSON.parse(raw) as { sessionId: string; token: string };
      this.sessionId = stored.sessionId;
      this.token = stored.token;
      return true;
    } catch {
      return false;
    }
  }

  private persistSession(): void {
    try {
      window.localStorage.setItem(
        SESSION_KEY,
        JSON.stringify({ sessionId: this.sessionId, token: this.token }),
      );
    } catch {
      // storage unavailable: sessions simply do not survive reloads
    }
  }

  forgetSession(): void {
    this.sessionId = null;
    this.token = null;
    try {
      window.localStorage.removeItem(SESSION_KEY);
    } catch {
      /* ignore */
    }
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    withToken = false,
  ): Promise<T> {
    const headers: Record<string, string> = {};
    if (body !== undefined) headers['Content-Type'] = 'application/json';
    if (withToken && this.token) headers['Authorization'] = `Bearer ${this.token}`;
    const response = await fetch(`${this.base}${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    return unwrap<T>(response);
  }

  async startSession(title: string): Promise<PromptInfo | null> {
    const data = await this.request<{
      session_id: string;
      token: string;
      prompt: PromptInfo | null;
    }>('POST', '/sessions', { title });
    this.sessionId = data.session_id;
    this.token = data.token;
    this.persistSession();
    return data.prompt;
  }

  currentSession(): string | null {
    return this.sessionId;
  }

  async prompt(): Promise<{ prompt: PromptInfo | null; phase: string }> {
    return this.request('GET', `/sessions/${this.sessionId}/prompt`, undefined, true);
  }

  async answer(promptId: string, payload: unknown): Promise<AnswerResponse> {
    return this.request(
      'POST',
      `/sessions/${this.sessionId}/answer`,
      { prompt_id: promptId, payload },
      true,
    );
  }

  async finish(): Promise<FinishResponse> {
    return this.request('POST', `/sessions/${this.sessionId}/finish`, undefined, true);
  }

  async sessionLayout(): Promise<MapLayout> {
    return this.request('GET', `/sessions/${this.sessionId}/layout`, undefined, true);
  }

  async mapLayout(mapId: string): Promise<MapLayout> {
    return this.request('GET', `/maps/${mapId}/layout`);
  }

  async hypotheses(mapId: string, prioritized: boolean): Promise<HypothesisRow[]> {
    const flag = prioritized ? '?prioritized=1' : '';
    const data = await this.request<{ hypotheses: HypothesisRow[] }>(
      'GET',
      `/maps/${mapId}/hypotheses${flag}`,
    );
    return data.hypotheses;
  }

  async summary(mapId: string): Promise<SummaryTable> {
    const data = await this.request<{ summary: SummaryTable }>(
      'GET',
      `/maps/${mapId}/summary`,
    );
    return data.summary;
  }

  async assess(
    mapId: string,
    hypothesisId: string,
    status: string,
    risk: string | null,
    evidence: EvidenceEntry[],
  ): Promise<void> {
    await this.request('POST', `/hypotheses/${hypothesisId}/assessment`, {
      map_id: mapId,
      status,
      risk,
      evidence,
    });
  }
}
