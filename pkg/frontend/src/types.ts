// JSON shapes served by the gateway's /v1 API. The console renders these
// verbatim; it never derives or recomputes explanation values itself.

export interface AlertRecord {
  alert_id: string;
  source_ref: string;
  score: number;
  label_class: number;
  attribution: Record<string, number>;
  base_value: number;
  auto_label: string;
  resolution_kind: 'known' | 'novel';
  resolution_label: string | null;
  status: 'pending' | 'confirmed' | 'renamed';
  created_at: number;
  reviewed_at: number | null;
  analyst: string;
  note: string;
  analyst_label: string | null;
}

export interface ExplainResponse {
  score: number;
  class: number;
  alert: AlertRecord | null;
}

export interface RegistryEntry {
  analyst_label: string;
  analyst: string;
  note: string;
  timestamp: number;
}

export interface Summary {
  mean_abs: Record<string, number>;
  ordering: string[];
  points: Record<string, [number | null, number][]>;
}

export interface ApiError {
  code: string;
  message: string;
}

export type ReviewAction =
  | { action: 'confirm' }
  | { action: 'rename'; analyst_label: string; note?: string };
