import type { AlertRecord } from './types.js';

// Flood-bucketing: the queue groups alerts sharing one canonical auto-label
// so an alarm storm of one pattern collapses into a single reviewable row.

export interface Bucket {
  autoLabel: string;
  count: number;
  resolutionKind: 'known' | 'novel';
  resolutionLabel: string | null;
  alerts: AlertRecord[];
}

export function bucketAlerts(alerts: AlertRecord[]): Bucket[] {
  const byLabel = new Map<string, AlertRecord[]>();
  for (const alert of alerts) {
    const group = byLabel.get(alert.auto_label);
    if (group) {
      group.push(alert);
    } else {
      byLabel.set(alert.auto_label, [alert]);
    }
  }
  const buckets: Bucket[] = [];
  for (const [autoLabel, group] of byLabel) {
    const latest = group[group.length - 1];
    buckets.push({
      autoLabel,
      count: group.length,
      resolutionKind: latest.resolution_kind,
      resolutionLabel: latest.resolution_label,
      alerts: group,
    });
  }
  // biggest flood first; ties alphabetical so the order is stable
  buckets.sort((a, b) => b.count - a.count || a.autoLabel.localeCompare(b.autoLabel));
  return buckets;
}

export function filterByStatus(alerts: AlertRecord[], status?: string): AlertRecord[] {
  if (!status) return alerts;
  return alerts.filter((a) => a.status === status);
}

export interface Page<T> {
  items: T[];
  page: number;
  pageCount: number;
}

export function paginate<T>(items: T[], page: number, pageSize = 20): Page<T> {
  const pageCount = Math.max(1, Math.ceil(items.length / pageSize));
  const clamped = Math.min(Math.max(page, 0), pageCount - 1);
  return {
    items: items.slice(clamped * pageSize, (clamped + 1) * pageSize),
    page: clamped,
    pageCount,
  };
}
