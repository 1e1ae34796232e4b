import type { AlertRecord, ExplainResponse, RegistryEntry, Summary } from './types.js';

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiRequestError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

// Thin typed client over the gateway. `fetchImpl` is injectable so tests can
// drive the console against an in-memory server.
export class ApiClient {
  constructor(
    private baseUrl: string = '',
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchImpl(this.baseUrl + path, init);
    const body = await resp.json().catch(() => ({}));
    if (!resp.ok) {
      throw new ApiRequestError(resp.status, body.code ?? 'error', body.message ?? resp.statusText);
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(payload),
    });
  }

  listAlerts(status?: string): Promise<{ alerts: AlertRecord[] }> {
    const query = status ? `?status=${encodeURIComponent(status)}` : '';
    return this.request(`/v1/alerts${query}`);
  }

  getAlert(alertId: string): Promise<AlertRecord> {
    return this.request(`/v1/alerts/${alertId}`);
  }

  reviewAlert(
    alertId: string,
    action: 'confirm' | 'rename',
    analystLabel?: string,
    note?: string,
    analyst?: string,
  ): Promise<AlertRecord> {
    return this.post(`/v1/alerts/${alertId}/review`, {
      action,
      analyst_label: analystLabel ?? null,
      note: note ?? '',
      analyst: analyst ?? '',
    });
  }

  registerLabel(
    autoLabel: string,
    analystLabel: string,
    note?: string,
    analyst?: string,
  ): Promise<{ auto_label: string; analyst_label: string }> {
    return this.post('/v1/labels', {
      auto_label: autoLabel,
      analyst_label: analystLabel,
      note: note ?? '',
      analyst: analyst ?? '',
    });
  }

  getRegistry(): Promise<{ entries: Record<string, RegistryEntry> }> {
    return this.request('/v1/registry');
  }

  getSummary(): Promise<Summary> {
    return this.request('/v1/summary');
  }

  explain(record: Record<string, unknown>, sourceRef = ''): Promise<ExplainResponse> {
    return this.post('/v1/explain', { record, source_ref: sourceRef });
  }
}
