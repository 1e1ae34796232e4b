import { ApiClient, ApiRequestError } from './api.js';
import type { AlertRecord } from './types.js';

// Optimistic review state: the UI flips an alert's status immediately, then
// confirms with the server. Errors roll the alert back; conflicts mean
// someone else reviewed it first, so the queue is reloaded from the server
// (the server is the single source of truth).

export interface ReviewOutcome {
  ok: boolean;
  conflicted?: boolean;
  error?: string;
}

export class ReviewController {
  alerts: AlertRecord[] = [];

  constructor(
    private api: ApiClient,
    private analyst = '',
  ) {}

  async load(status?: string): Promise<void> {
    const resp = await this.api.listAlerts(status);
    this.alerts = resp.alerts;
  }

  find(alertId: string): AlertRecord | undefined {
    return this.alerts.find((a) => a.alert_id === alertId);
  }

  async confirm(alertId: string): Promise<ReviewOutcome> {
    return this.mutate(alertId, 'confirm');
  }

  async rename(alertId: string, analystLabel: string, note = ''): Promise<ReviewOutcome> {
    if (!analystLabel.trim()) {
      return { ok: false, error: 'analyst label must not be empty' };
    }
    return this.mutate(alertId, 'rename', analystLabel.trim(), note);
  }

  // Rename an entire bucket: register the mapping once, then mark every
  // pending alert carrying the auto-label.
  async renameBucket(autoLabel: string, analystLabel: string, note = ''): Promise<ReviewOutcome> {
    if (!analystLabel.trim()) {
      return { ok: false, error: 'analyst label must not be empty' };
    }
    const members = this.alerts.filter(
      (a) => a.auto_label === autoLabel && a.status === 'pending',
    );
    for (const member of members) {
      const outcome = await this.rename(member.alert_id, analystLabel, note);
      if (!outcome.ok) return outcome;
    }
    return { ok: true };
  }

  private snapshot(alert: AlertRecord): AlertRecord {
    return { ...alert };
  }

  private async mutate(
    alertId: string,
    action: 'confirm' | 'rename',
    analystLabel?: string,
    note = '',
  ): Promise<ReviewOutcome> {
    const alert = this.find(alertId);
    if (!alert) return { ok: false, error: `unknown alert ${alertId}` };
    const before = this.snapshot(alert);
    alert.status = action === 'confirm' ? 'confirmed' : 'renamed';
    alert.analyst_label = action === 'rename' ? (analystLabel ?? null) : null;
    try {
      if (action === 'rename') {
        // the registry mapping is what future resolutions consult
        await this.api.registerLabel(alert.auto_label, analystLabel!, note, this.analyst);
      }
      const updated = await this.api.reviewAlert(alertId, action, analystLabel, note, this.analyst);
      Object.assign(alert, updated);
      return { ok: true };
    } catch (err) {
      Object.assign(alert, before); // roll the optimistic change back
      if (err instanceof ApiRequestError && err.status === 409) {
        await this.load();
        return { ok: false, conflicted: true, error: err.message };
      }
      return { ok: false, error: err instanceof Error ? err.message : String(err) };
    }
  }
}
