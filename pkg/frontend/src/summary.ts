import type { BarModel } from './bars.js';
import type { Summary } from './types.js';

// Global importance view: one bar per column, in the server-provided
// importance order (the console never re-ranks).

export function summaryBars(summary: Summary, topK = 15): BarModel[] {
  const ordering = summary.ordering.slice(0, topK);
  const maxAbs = Math.max(...ordering.map((c) => summary.mean_abs[c] ?? 0), 1e-12);
  return ordering.map((column) => ({
    feature: column,
    value: summary.mean_abs[column] ?? 0,
    widthPct: Math.round(((summary.mean_abs[column] ?? 0) / maxAbs) * 100),
    color: 'red' as const, // mean |phi| is unsigned; shown in the attack hue
  }));
}
