import { ApiClient, ApiError } from './client';
import { AnnotationItem, AnnotationSubmission, Task } from './types';

export const LABELS: Record<Task, string[]> = {
  sentiment: ['negative', 'neutral', 'positive'],
  disambig: ['related', 'unrelated'],
};

export type SessionState =
  | { status: 'idle' }
  | { status: 'annotating'; item: AnnotationItem }
  | { status: 'done' }
  | { status: 'error'; message: string };

export interface SessionNotice {
  kind: 'duplicate' | 'retry';
  message: string;
}

/** Annotation workflow: fetch next, label, auto-advance. Submissions are
 * serialized; failed ones are queued and retried before the next submit. */
export class AnnotationSession {
  state: SessionState = { status: 'idle' };
  submitted = 0;
  notices: SessionNotice[] = [];

  private pending: AnnotationSubmission[] = [];
  private submitting: Promise<void> = Promise.resolve();

  constructor(
    private client: ApiClient,
    readonly task: Task,
    readonly annotator: string,
  ) {
    if (!annotator) {
      throw new Error('annotator name is required');
    }
  }

  async start(): Promise<void> {
    await this.advance();
  }

  private async advance(): Promise<void> {
    try {
      const item = await this.client.annotationNext(this.task);
      this.state = item === null ? { status: 'done' } : { status: 'annotating', item };
    } catch (err) {
      this.state = {
        status: 'error',
        message: err instanceof Error ? err.message : String(err),
      };
    }
  }

  /** Map a keypress to a label: "1"/"2"/"3" in label order. */
  labelForKey(key: string): string | null {
    const index = Number.parseInt(key, 10) - 1;
    const labels = LABELS[this.task];
    return index >= 0 && index < labels.length ? labels[index] : null;
  }

  async handleKey(key: string): Promise<void> {
    const label = this.labelForKey(key);
    if (label !== null) {
      await this.submit(label);
    }
  }

  async submit(label: string): Promise<void> {
    if (this.state.status !== 'annotating') {
      return;
    }
    if (!LABELS[this.task].includes(label)) {
      throw new Error(`bad label for ${this.task}: ${label}`);
    }
    const item = this.state.item;
    const submission: AnnotationSubmission = {
      doc_id: item.document.id,
      task: this.task,
      label,
      annotator: this.annotator,
    };
    if (item.entity) {
      submission.entity_id = item.entity.id;
    }
    // chain on the previous submission so posts stay in order
    this.submitting = this.submitting.then(() => this.flushAndSend(submission));
    await this.submitting;
    await this.advance();
  }

  /** Retry anything queued from earlier failures, then send this one. */
  private async flushAndSend(submission: AnnotationSubmission): Promise<void> {
    const queue = [...this.pending, submission];
    this.pending = [];
    for (const entry of queue) {
      try {
        await this.client.submitAnnotation(entry);
        this.submitted += 1;
      } catch (err) {
        if (err instanceof ApiError && err.status === 409) {
          this.notices.push({
            kind: 'duplicate',
            message: `already annotated: ${entry.doc_id}`,
          });
          continue; // server has it; skip forward
        }
        // network or server failure: keep it for the next flush
        this.pending.push(entry);
        this.notices.push({
          kind: 'retry',
          message: `queued for retry: ${entry.doc_id}`,
        });
      }
    }
  }

  /** Explicit retry of queued submissions, e.g. from a banner button. */
  async retryPending(): Promise<void> {
    const queue = this.pending;
    this.pending = [];
    for (const entry of queue) {
      try {
        await this.client.submitAnnotation(entry);
        this.submitted += 1;
      } catch (err) {
        if (err instanceof ApiError && err.status === 409) {
          continue;
        }
        this.pending.push(entry);
      }
    }
  }

  pendingCount(): number {
    return this.pending.length;
  }
}

/** Wrap mention spans of the current item in <mark> tags using the offsets
 * from the API verbatim. */
export function highlightMentions(item: AnnotationItem): string {
  const text = item.document.text;
  const spans = [...item.mentions].sort((a, b) => a.byte_start - b.byte_start);
  let out = '';
  let cursor = 0;
  for (const span of spans) {
    if (span.byte_start < cursor) continue; // overlapping span, keep the first
    out += escapeHtml(text.slice(cursor, span.byte_start));
    out += `<mark>${escapeHtml(text.slice(span.byte_start, span.byte_end))}</mark>`;
    cursor = span.byte_end;
  }
  out += escapeHtml(text.slice(cursor));
  return out;
}

function escapeHtml(s: string): string {
  return s
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;');
}
