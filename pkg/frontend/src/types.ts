export type Medium = 'twitter' | 'blogs' | 'news';
export type BuzzMode = 'share' | 'count';
export type SentimentMetric = 'log_ratio' | 'negatives_share';
export type Smoothing = 'reactive' | 'default' | 'smooth' | 'none';
export type Task = 'sentiment' | 'disambig';

export interface IndicatorPoint {
  date: string;
  value: number | null;
  smoothed: number | null;
}

export interface IndicatorSeries {
  entity: string;
  medium: Medium;
  metric: string;
  smoothing: Smoothing;
  points: IndicatorPoint[];
}

export interface EntityInfo {
  id: string;
  canonical: string;
  surface_forms: string[];
  profession: string | null;
  party: string | null;
}

export interface MentionSpan {
  entity_id: string;
  byte_start: number;
  byte_end: number;
  surface: string;
}

export interface AnnotationItem {
  document: {
    id: string;
    source: string;
    timestamp: string;
    text: string;
  };
  task: Task;
  mentions: MentionSpan[];
  entity?: { id: string; canonical: string };
}

export interface AnnotationSubmission {
  doc_id: string;
  task: Task;
  label: string;
  annotator: string;
  entity_id?: string;
}
