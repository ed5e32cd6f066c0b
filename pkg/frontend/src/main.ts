import { AnnotationSession, highlightMentions, LABELS } from './annotation';
import { ApiClient } from './client';
import { buildGrid, formatDelta } from './dashboard';
import { lineSegments, SeriesView } from './series';
import { Smoothing, Task } from './types';

const SMOOTHINGS: Smoothing[] = ['reactive', 'default', 'smooth', 'none'];

function el(tag: string, className: string, text = ''): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  if (text) node.textContent = text;
  return node;
}

function sparklineSvg(values: Array<number | null>, width = 120, height = 28): string {
  const present = values.filter((v): v is number => v !== null);
  if (present.length === 0) {
    return `<svg width="${width}" height="${height}"><text x="4" y="18">—</text></svg>`;
  }
  const min = Math.min(...present);
  const max = Math.max(...present);
  const span = max - min || 1;
  const step = width / Math.max(values.length - 1, 1);
  const paths: string[] = [];
  let d = '';
  values.forEach((v, i) => {
    if (v === null) {
      if (d) paths.push(d);
      d = '';
      return;
    }
    const x = (i * step).toFixed(1);
    const y = (height - 2 - ((v - min) / span) * (height - 4)).toFixed(1);
    d += d ? ` L${x},${y}` : `M${x},${y}`;
  });
  if (d) paths.push(d);
  const lines = paths.map((p) => `<path d="${p}" fill="none" stroke="currentColor"/>`).join('');
  return `<svg width="${width}" height="${height}">${lines}</svg>`;
}

function renderSeriesPanel(root: HTMLElement, client: ApiClient): void {
  const panel = el('section', 'series-panel');
  const select = document.createElement('select');
  for (const s of SMOOTHINGS) {
    const option = document.createElement('option');
    option.value = s;
    option.textContent = s;
    option.selected = s === 'default';
    select.appendChild(option);
  }
  const chart = el('div', 'chart');
  panel.append(select, chart);
  root.appendChild(panel);

  const view = new SeriesView(client, { indicator: 'buzz', medium: 'twitter', mode: 'share' });
  view.onChange((state) => {
    if (state.status === 'loading') {
      chart.textContent = 'loading…';
      return;
    }
    if (state.status === 'error') {
      chart.textContent = '';
      chart.append(el('p', 'error', state.message));
      const retry = el('button', 'retry', 'retry');
      retry.addEventListener('click', () => void view.retry());
      chart.append(retry);
      return;
    }
    if (state.status !== 'loaded') return;
    if (state.series.length === 0) {
      chart.textContent = 'no data in this window';
      return;
    }
    chart.innerHTML = state.series
      .map((s) => {
        const segments = lineSegments(s, 'smoothed').length;
        return `<div class="row"><span>${s.entity}</span>` +
          `${sparklineSvg(s.points.map((p) => p.value))}` +
          `<small>${segments} segment(s)</small></div>`;
      })
      .join('');
  });
  select.addEventListener('change', () => void view.setSmoothing(select.value as Smoothing));
  void view.load();
}

async function renderDashboard(root: HTMLElement, client: ApiClient): Promise<void> {
  const panel = el('section', 'dashboard-panel');
  root.appendChild(panel);
  try {
    const rows = await buildGrid(client, {
      medium: 'twitter',
      sentimentMetric: 'log_ratio',
      smoothing: 'default',
    });
    for (const row of rows) {
      const div = el('div', 'trend-row');
      div.append(el('strong', 'entity', row.entity));
      for (const cell of row.cells) {
        const c = el('span', 'cell');
        c.innerHTML = `${sparklineSvg(cell.spark)} ${cell.metric}: ` +
          `${cell.latest === null ? '—' : cell.latest.toFixed(3)} (${formatDelta(cell.delta7)})`;
        div.append(c);
      }
      panel.appendChild(div);
    }
  } catch (err) {
    panel.append(el('p', 'error', err instanceof Error ? err.message : String(err)));
  }
}

function renderAnnotation(root: HTMLElement, client: ApiClient, task: Task): void {
  const annotator = window.localStorage.getItem('annotator') || 'anonymous';
  const session = new AnnotationSession(client, task, annotator);
  const panel = el('section', 'annotation-panel');
  const textBox = el('div', 'doc-text');
  const buttons = el('div', 'label-buttons');
  const status = el('p', 'status');
  panel.append(textBox, buttons, status);
  root.appendChild(panel);

  const refresh = () => {
    if (session.state.status === 'done') {
      textBox.textContent = 'all caught up';
      buttons.textContent = '';
    } else if (session.state.status === 'annotating') {
      textBox.innerHTML = highlightMentions(session.state.item);
    } else if (session.state.status === 'error') {
      textBox.textContent = session.state.message;
    }
    status.textContent =
      `${session.submitted} submitted` +
      (session.pendingCount() ? `, ${session.pendingCount()} queued` : '');
  };

  LABELS[task].forEach((label, i) => {
    const button = el('button', 'label', `${i + 1} ${label}`);
    button.addEventListener('click', () => void session.submit(label).then(refresh));
    buttons.appendChild(button);
  });
  document.addEventListener('keydown', (event) => {
    const target = event.target as HTMLElement | null;
    if (target && ['INPUT', 'TEXTAREA', 'SELECT'].includes(target.tagName)) return;
    void session.handleKey(event.key).then(refresh);
  });
  void session.start().then(refresh);
}

export function boot(root: HTMLElement): void {
  const base = (window as { API_BASE?: string }).API_BASE ?? '';
  const token = window.localStorage.getItem('api_token');
  const client = new ApiClient(base, token);
  renderSeriesPanel(root, client);
  void renderDashboard(root, client);
  renderAnnotation(root, client, 'sentiment');
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  boot(document.getElementById('app') as HTMLElement);
}
