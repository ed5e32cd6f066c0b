import { ApiClient, SeriesQuery } from './client';
import {
  BuzzMode,
  IndicatorSeries,
  Medium,
  SentimentMetric,
  Smoothing,
} from './types';

export type SeriesKind =
  | { indicator: 'buzz'; medium: Medium; mode: BuzzMode }
  | { indicator: 'sentiment'; metric: SentimentMetric };

export type SeriesState =
  | { status: 'idle' }
  | { status: 'loading' }
  | { status: 'loaded'; series: IndicatorSeries[] }
  | { status: 'error'; message: string };

/** A segment of consecutive non-null points; nulls split the line into gaps. */
export interface Segment {
  dates: string[];
  values: number[];
}

/** State container for the series explorer. Smoothing lives server-side;
 * changing any selection refetches, it never refilters locally. */
export class SeriesView {
  state: SeriesState = { status: 'idle' };

  private listeners: Array<(state: SeriesState) => void> = [];

  constructor(
    private client: ApiClient,
    public kind: SeriesKind,
    public smoothing: Smoothing = 'default',
    public entities: string[] = [],
    public from?: string,
    public to?: string,
  ) {}

  onChange(listener: (state: SeriesState) => void): void {
    this.listeners.push(listener);
  }

  private setState(state: SeriesState): void {
    this.state = state;
    for (const listener of this.listeners) listener(state);
  }

  async load(): Promise<void> {
    this.setState({ status: 'loading' });
    const query: SeriesQuery = {
      smoothing: this.smoothing,
      from: this.from,
      to: this.to,
      entities: this.entities,
    };
    try {
      const series =
        this.kind.indicator === 'buzz'
          ? await this.client.buzz(this.kind.medium, this.kind.mode, query)
          : await this.client.sentiment(this.kind.metric, query);
      this.setState({ status: 'loaded', series });
    } catch (err) {
      this.setState({ status: 'error', message: err instanceof Error ? err.message : String(err) });
    }
  }

  /** One refetch per selector change; the server does the smoothing. */
  async setSmoothing(smoothing: Smoothing): Promise<void> {
    this.smoothing = smoothing;
    await this.load();
  }

  async setEntities(entities: string[]): Promise<void> {
    this.entities = entities;
    await this.load();
  }

  async setRange(from?: string, to?: string): Promise<void> {
    this.from = from;
    this.to = to;
    await this.load();
  }

  /** Retry affordance for the error state. */
  async retry(): Promise<void> {
    await this.load();
  }

  isEmpty(): boolean {
    return this.state.status === 'loaded' && this.state.series.length === 0;
  }
}

/** Points handed to the chart, one per payload point, nulls preserved. */
export function plottedPoints(
  series: IndicatorSeries,
  layer: 'value' | 'smoothed',
): Array<{ date: string; y: number | null }> {
  return series.points.map((p) => ({ date: p.date, y: p[layer] }));
}

/** Split a series into line segments so nulls render as gaps. */
export function lineSegments(series: IndicatorSeries, layer: 'value' | 'smoothed'): Segment[] {
  const segments: Segment[] = [];
  let current: Segment | null = null;
  for (const point of series.points) {
    const y = point[layer];
    if (y === null) {
      current = null;
      continue;
    }
    if (current === null) {
      current = { dates: [], values: [] };
      segments.push(current);
    }
    current.dates.push(point.date);
    current.values.push(y);
  }
  return segments;
}
