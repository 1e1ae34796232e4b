// Signed horizontal bar models for per-feature attribution values.
// Red bars push toward attack (positive), blue toward normal (negative).

export interface BarModel {
  feature: string;
  value: number;
  widthPct: number;
  color: 'red' | 'blue';
}

export function buildBarModels(phi: Record<string, number>, topK = 8): BarModel[] {
  const entries = Object.entries(phi)
    .sort((a, b) => {
      const byMagnitude = Math.abs(b[1]) - Math.abs(a[1]);
      return byMagnitude !== 0 ? byMagnitude : a[0].localeCompare(b[0]);
    })
    .slice(0, topK);
  const maxAbs = Math.max(...entries.map(([, v]) => Math.abs(v)), 1e-12);
  return entries.map(([feature, value]) => ({
    feature,
    value,
    widthPct: Math.round((Math.abs(value) / maxAbs) * 100),
    color: value >= 0 ? 'red' : 'blue',
  }));
}

export function renderBars(bars: BarModel[]): string {
  if (bars.length === 0) {
    return '<div class="empty">no attribution</div>';
  }
  return bars
    .map(
      (b) => `
      <div class="bar-row">
        <span class="bar-label" title="${escapeHtml(b.feature)}">${escapeHtml(b.feature)}</span>
        <span class="bar-track">
          <span class="bar-fill bar-${b.color}" style="width:${b.widthPct}%"></span>
        </span>
        <span class="bar-value">${b.value >= 0 ? '+' : ''}${b.value.toFixed(4)}</span>
      </div>`,
    )
    .join('');
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}
