// Application state: schema, queue, progress, and the submission path.
// The queue is updated optimistically after an acknowledged submission and
// immediately reconciled against the server; the server log stays the only
// source of truth.

import { ApiClient } from "./api";
import { SubmissionQueue, type SubmitOutcome } from "./retry";
import {
  candidateKey,
  type AnnotationSubmission,
  type CandidateKey,
  type Progress,
  type QueueItem,
  type Schema,
} from "./types";

export class Store {
  readonly api: ApiClient;
  readonly submissions: SubmissionQueue;
  schema: Schema | null = null;
  queue: QueueItem[] = [];
  pending = 0;
  progress: Progress | null = null;
  annotator = "expert";
  onchange: (() => void) | null = null;

  constructor(api: ApiClient) {
    this.api = api;
    this.submissions = new SubmissionQueue((s) => api.annotate(s));
    this.submissions.onstatechange = () => this.onchange?.();
  }

  async init(): Promise<void> {
    this.schema = await this.api.schema();
    await this.refresh();
  }

  async refresh(): Promise<void> {
    const [queue, progress] = await Promise.all([
      this.api.queue(),
      this.api.progress(),
    ]);
    this.queue = queue.items;
    this.pending = queue.pending;
    this.progress = progress;
    this.onchange?.();
  }

  nextAfter(key: CandidateKey): QueueItem | null {
    const remaining = this.queue.filter(
      (item) => candidateKey(item) !== candidateKey(key),
    );
    return remaining[0] ?? null;
  }

  /**
   * Submit a decision: optimistic removal from the local queue, then
   * reconciliation with the server. Queued (offline) submissions keep the
   * optimistic state and reconcile when the retry succeeds.
   */
  async submitDecision(
    key: CandidateKey,
    category: string,
    subtype: string,
    note = "",
  ): Promise<SubmitOutcome> {
    const submission: AnnotationSubmission = {
      annotator: this.annotator,
      utterance_id: key.utterance_id,
      system_id: key.system_id,
      ref_index: key.ref_index,
      category,
      subtype,
      note,
    };
    const outcome = await this.submissions.submit(submission);
    if (outcome.status === "rejected") {
      return outcome;
    }
    this.queue = this.queue.filter(
      (item) => candidateKey(item) !== candidateKey(key),
    );
    this.pending = Math.max(0, this.pending - 1);
    this.onchange?.();
    if (outcome.status === "acknowledged") {
      await this.refresh();
    } else {
      void outcome.settled.then(() => this.refresh()).catch(() => undefined);
    }
    return outcome;
  }
}
