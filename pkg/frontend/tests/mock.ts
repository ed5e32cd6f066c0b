import { FetchLike } from '../src/client';
import { IndicatorPoint, IndicatorSeries } from '../src/types';

export interface RecordedRequest {
  url: URL;
  method: string;
  body: unknown;
}

export type Responder = (req: RecordedRequest) => Response | Promise<Response>;

/** Records every request and delegates to a swappable responder. */
export class MockApi {
  requests: RecordedRequest[] = [];
  responder: Responder = () => json(200, { data: [] });

  fetch: FetchLike = async (url, init) => {
    const req: RecordedRequest = {
      url: new URL(url, 'http://test'),
      method: init?.method ?? 'GET',
      body: init?.body ? JSON.parse(init.body as string) : null,
    };
    this.requests.push(req);
    return this.responder(req);
  };

  requestsTo(path: string): RecordedRequest[] {
    return this.requests.filter((r) => r.url.pathname === path);
  }

  clear(): void {
    this.requests = [];
  }
}

export function json(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'Content-Type': 'application/json' },
  });
}

export function makeSeries(
  entity: string,
  values: Array<number | null>,
  overrides: Partial<IndicatorSeries> = {},
): IndicatorSeries {
  const points: IndicatorPoint[] = values.map((v, i) => ({
    date: `2015-03-${String(i + 1).padStart(2, '0')}`,
    value: v,
    smoothed: v,
  }));
  return {
    entity,
    medium: 'twitter',
    metric: 'share',
    smoothing: 'default',
    points,
    ...overrides,
  };
}
