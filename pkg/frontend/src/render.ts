import { buildBarModels, escapeHtml, renderBars } from './bars.js';
import type { Bucket } from './queue.js';
import type { AlertRecord, RegistryEntry, Summary } from './types.js';
import { summaryBars } from './summary.js';

export function renderRetryBanner(message: string): string {
  return `
    <div class="banner banner-error">
      gateway unreachable (${escapeHtml(message)})
      <button data-action="retry">retry</button>
    </div>`;
}

export function renderBucket(bucket: Bucket, expanded: boolean): string {
  const resolution =
    bucket.resolutionKind === 'known'
      ? `<span class="pill pill-known">${escapeHtml(bucket.resolutionLabel ?? '')}</span>`
      : '<span class="pill pill-novel">novel</span>';
  const rows = expanded
    ? bucket.alerts.map((a) => renderAlertRow(a)).join('')
    : '';
  return `
    <section class="bucket" data-bucket="${escapeHtml(bucket.autoLabel)}">
      <header class="bucket-header" data-action="toggle" data-bucket="${escapeHtml(bucket.autoLabel)}">
        <span class="bucket-count">${bucket.count}</span>
        <code class="bucket-label">${escapeHtml(bucket.autoLabel)}</code>
        ${resolution}
        <span class="bucket-actions">
          <input class="rename-input" data-bucket="${escapeHtml(bucket.autoLabel)}"
                 placeholder="attack name" />
          <button data-action="rename-bucket" data-bucket="${escapeHtml(bucket.autoLabel)}">rename</button>
        </span>
      </header>
      ${rows}
    </section>`;
}

export function renderAlertRow(alert: AlertRecord): string {
  const bars = renderBars(buildBarModels(alert.attribution));
  return `
    <article class="alert" data-alert="${alert.alert_id}">
      <div class="alert-meta">
        <code>${alert.alert_id}</code>
        <span class="score">score ${alert.score.toFixed(3)}</span>
        <span class="status status-${alert.status}">${alert.status}</span>
        <span class="alert-actions">
          <button data-action="confirm" data-alert="${alert.alert_id}">confirm</button>
          <input class="rename-input" data-alert="${alert.alert_id}" placeholder="attack name" />
          <button data-action="rename" data-alert="${alert.alert_id}">rename</button>
        </span>
      </div>
      <div class="bars">${bars}</div>
    </article>`;
}

export function renderSummary(summary: Summary): string {
  if (summary.ordering.length === 0) {
    return '<div class="empty">no attributions yet; explain some flows first</div>';
  }
  return renderBars(summaryBars(summary));
}

export function renderRegistry(entries: Record<string, RegistryEntry>): string {
  const keys = Object.keys(entries).sort();
  if (keys.length === 0) {
    return '<div class="empty">registry is empty</div>';
  }
  const rows = keys
    .map(
      (k) => `
      <tr>
        <td><code>${escapeHtml(k)}</code></td>
        <td>${escapeHtml(entries[k].analyst_label)}</td>
        <td>${escapeHtml(entries[k].analyst)}</td>
        <td>${escapeHtml(entries[k].note)}</td>
      </tr>`,
    )
    .join('');
  return `
    <table class="registry">
      <thead><tr><th>auto-label</th><th>analyst label</th><th>analyst</th><th>note</th></tr></thead>
      <tbody>${rows}</tbody>
    </table>`;
}
