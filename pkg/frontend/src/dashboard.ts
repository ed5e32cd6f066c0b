import { ApiClient } from './client';
import { IndicatorSeries, Medium, SentimentMetric, Smoothing } from './types';

export interface TrendCell {
  entity: string;
  metric: string;
  /** Sparkline input: the payload values verbatim, nulls as gaps. */
  spark: Array<number | null>;
  latest: number | null;
  /** latest minus the value 7 days prior; null when either is missing. */
  delta7: number | null;
}

export interface TrendRow {
  entity: string;
  cells: TrendCell[];
}

export function latestValue(series: IndicatorSeries): number | null {
  for (let i = series.points.length - 1; i >= 0; i--) {
    const v = series.points[i].value;
    if (v !== null) return v;
  }
  return null;
}

/** last minus prior, both read straight from the payload grid. */
export function delta7(series: IndicatorSeries): number | null {
  const n = series.points.length;
  if (n < 8) return null;
  const last = series.points[n - 1].value;
  const prior = series.points[n - 8].value;
  if (last === null || prior === null) return null;
  return last - prior;
}

export function toCell(series: IndicatorSeries, metricLabel: string): TrendCell {
  return {
    entity: series.entity,
    metric: metricLabel,
    spark: series.points.map((p) => p.value),
    latest: latestValue(series),
    delta7: delta7(series),
  };
}

/** "—" placeholder for entities with nothing to show, signed value otherwise. */
export function formatDelta(delta: number | null): string {
  if (delta === null) return '—';
  const sign = delta > 0 ? '+' : '';
  return `${sign}${delta.toFixed(3)}`;
}

export interface GridConfig {
  medium: Medium;
  sentimentMetric: SentimentMetric;
  smoothing: Smoothing;
  from?: string;
  to?: string;
}

/** One row per entity, one cell per metric: buzz share plus a sentiment
 * metric, both fetched concurrently from the API. */
export async function buildGrid(client: ApiClient, config: GridConfig): Promise<TrendRow[]> {
  const query = { smoothing: config.smoothing, from: config.from, to: config.to };
  const [buzz, sentiment] = await Promise.all([
    client.buzz(config.medium, 'share', query),
    client.sentiment(config.sentimentMetric, query),
  ]);
  const sentimentByEntity = new Map(sentiment.map((s) => [s.entity, s]));
  return buzz.map((series) => {
    const cells = [toCell(series, 'buzz share')];
    const sent = sentimentByEntity.get(series.entity);
    if (sent) {
      cells.push(toCell(sent, config.sentimentMetric));
    }
    return { entity: series.entity, cells };
  });
}
