import {
  AnnotationItem,
  AnnotationSubmission,
  BuzzMode,
  EntityInfo,
  IndicatorSeries,
  Medium,
  SentimentMetric,
  Smoothing,
  Task,
} from './types';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

export interface SeriesQuery {
  smoothing: Smoothing;
  from?: string;
  to?: string;
  entities?: string[];
}

/** Thin wrapper over the JSON API. Every displayed number comes from here;
 * the client never recomputes indicator math. */
export class ApiClient {
  constructor(
    private baseUrl: string,
    private token: string | null = null,
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private headers(): Record<string, string> {
    const headers: Record<string, string> = { 'Content-Type': 'application/json' };
    if (this.token) {
      headers['Authorization'] = `Bearer ${this.token}`;
    }
    return headers;
  }

  private async unwrap<T>(response: Response): Promise<T> {
    const body = await response.json();
    if (!response.ok) {
      const err = body?.error ?? { code: 'unknown', message: `HTTP ${response.status}` };
      throw new ApiError(response.status, err.code, err.message);
    }
    return body.data as T;
  }

  private async getJson<T>(path: string, params: URLSearchParams): Promise<T> {
    const query = params.toString();
    const url = `${this.baseUrl}${path}${query ? `?${query}` : ''}`;
    return this.unwrap<T>(await this.fetchFn(url, { headers: this.headers() }));
  }

  async entities(): Promise<EntityInfo[]> {
    return this.getJson('/api/v1/entities', new URLSearchParams());
  }

  async buzz(medium: Medium, mode: BuzzMode, query: SeriesQuery): Promise<IndicatorSeries[]> {
    const params = new URLSearchParams({ medium, mode, smoothing: query.smoothing });
    if (query.from) params.set('from', query.from);
    if (query.to) params.set('to', query.to);
    for (const entity of query.entities ?? []) params.append('entity', entity);
    return this.getJson('/api/v1/indicators/buzz', params);
  }

  async sentiment(metric: SentimentMetric, query: SeriesQuery): Promise<IndicatorSeries[]> {
    const params = new URLSearchParams({ metric, smoothing: query.smoothing });
    if (query.from) params.set('from', query.from);
    if (query.to) params.set('to', query.to);
    for (const entity of query.entities ?? []) params.append('entity', entity);
    return this.getJson('/api/v1/indicators/sentiment', params);
  }

  /** Returns null when the annotation queue is exhausted (HTTP 204). */
  async annotationNext(task: Task): Promise<AnnotationItem | null> {
    const url = `${this.baseUrl}/api/v1/annotation/next?task=${task}`;
    const response = await this.fetchFn(url, { headers: this.headers() });
    if (response.status === 204) {
      return null;
    }
    return this.unwrap<AnnotationItem>(response);
  }

  async submitAnnotation(submission: AnnotationSubmission): Promise<void> {
    const response = await this.fetchFn(`${this.baseUrl}/api/v1/annotation`, {
      method: 'POST',
      headers: this.headers(),
      body: JSON.stringify(submission),
    });
    await this.unwrap(response);
  }
}
