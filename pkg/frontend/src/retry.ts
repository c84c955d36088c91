// At-least-once submission queue. A decision that cannot reach the server
// stays in an in-memory buffer and is retried with backoff until the server
// acknowledges it; the server deduplicates identical retries, so nothing is
// ever double-counted and nothing is silently dropped. Validation
// rejections (4xx) are not retried: they go back to the caller.

import { RejectedError } from "./api";
import type { AnnotateResponse, AnnotationSubmission } from "./types";

export interface SubmitOutcome {
  status: "acknowledged" | "queued" | "rejected";
  response?: AnnotateResponse;
  error?: string;
}

type PostFn = (s: AnnotationSubmission) => Promise<AnnotateResponse>;

interface BufferedSubmission {
  submission: AnnotationSubmission;
  resolve: (r: AnnotateResponse) => void;
  reject: (e: unknown) => void;
}

export class SubmissionQueue {
  private readonly post: PostFn;
  private readonly baseDelayMs: number;
  private readonly maxDelayMs: number;
  private buffer: BufferedSubmission[] = [];
  private timer: ReturnType<typeof setTimeout> | null = null;
  private delayMs: number;
  onstatechange: ((bufferedCount: number) => void) | null = null;

  constructor(post: PostFn, baseDelayMs = 1000, maxDelayMs = 15000) {
    this.post = post;
    this.baseDelayMs = baseDelayMs;
    this.maxDelayMs = maxDelayMs;
    this.delayMs = baseDelayMs;
  }

  get bufferedCount(): number {
    return this.buffer.length;
  }

  /**
   * Submit a decision. Resolves "acknowledged" when the server stored it,
   * "queued" when it is buffered for retry, "rejected" on validation
   * errors. Queued submissions resolve their `settled` promise once a
   * later flush succeeds.
   */
  async submit(
    submission: AnnotationSubmission,
  ): Promise<SubmitOutcome & { settled: Promise<AnnotateResponse> }> {
    try {
      const response = await this.post(submission);
      this.delayMs = this.baseDelayMs;
      return {
        status: "acknowledged",
        response,
        settled: Promise.resolve(response),
      };
    } catch (err) {
      if (err instanceof RejectedError) {
        const settled = Promise.reject<AnnotateResponse>(err);
        settled.catch(() => undefined); // surfaced through the outcome
        return { status: "rejected", error: err.message, settled };
      }
      const settled = new Promise<AnnotateResponse>((resolve, reject) => {
        this.buffer.push({ submission, resolve, reject });
      });
      settled.catch(() => undefined); // surfaced through outcome objects
      this.notify();
      this.scheduleFlush();
      return {
        status: "queued",
        error: err instanceof Error ? err.message : String(err),
        settled,
      };
    }
  }

  /** Try to drain the buffer now; reschedules itself while anything fails. */
  async flush(): Promise<void> {
    const pending = this.buffer;
    this.buffer = [];
    this.notify();
    for (const entry of pending) {
      try {
        const response = await this.post(entry.submission);
        entry.resolve(response);
      } catch (err) {
        if (err instanceof RejectedError) {
          entry.reject(err);
          continue;
        }
        this.buffer.push(entry);
      }
    }
    this.notify();
    if (this.buffer.length > 0) {
      this.delayMs = Math.min(this.delayMs * 2, this.maxDelayMs);
      this.scheduleFlush();
    } else {
      this.delayMs = this.baseDelayMs;
    }
  }

  private scheduleFlush(): void {
    if (this.timer !== null) {
      return;
    }
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.flush();
    }, this.delayMs);
  }

  private notify(): void {
    this.onstatechange?.(this.buffer.length);
  }
}
