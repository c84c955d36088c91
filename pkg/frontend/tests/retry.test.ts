import { describe, expect, test } from "vitest";

import { RejectedError } from "../src/api";
import { SubmissionQueue } from "../src/retry";
import type { AnnotateResponse, AnnotationSubmission } from "../src/types";

const SUBMISSION: AnnotationSubmission = {
  annotator: "expert",
  utterance_id: "u1",
  system_id: "demo",
  ref_index: 1,
  category: "Fail",
  subtype: "4.1",
};

function okResponse(s: AnnotationSubmission): AnnotateResponse {
  return {
    ok: true,
    appended: true,
    record: { ...s, timestamp: "t" },
    pending: 0,
  };
}

describe("SubmissionQueue", () => {
  test("acknowledges immediately when the server is up", async () => {
    const posted: AnnotationSubmission[] = [];
    const queue = new SubmissionQueue(async (s) => {
      posted.push(s);
      return okResponse(s);
    });
    const outcome = await queue.submit(SUBMISSION);
    expect(outcome.status).toBe("acknowledged");
    expect(posted).toHaveLength(1);
    expect(queue.bufferedCount).toBe(0);
  });

  test("buffers on network failure and retries until success", async () => {
    let failures = 2;
    const posted: AnnotationSubmission[] = [];
    const queue = new SubmissionQueue(
      async (s) => {
        if (failures > 0) {
          failures -= 1;
          throw new Error("connection refused");
        }
        posted.push(s);
        return okResponse(s);
      },
      5, // fast retries for the test
    );
    const outcome = await queue.submit(SUBMISSION);
    expect(outcome.status).toBe("queued");
    expect(queue.bufferedCount).toBe(1);
    const response = await outcome.settled;
    expect(response.ok).toBe(true);
    expect(posted).toHaveLength(1);
    expect(queue.bufferedCount).toBe(0);
  });

  test("payload survives the retry unchanged (at-least-once)", async () => {
    let first = true;
    const seen: AnnotationSubmission[] = [];
    const queue = new SubmissionQueue(async (s) => {
      seen.push(s);
      if (first) {
        first = false;
        throw new Error("down");
      }
      return okResponse(s);
    }, 5);
    const outcome = await queue.submit(SUBMISSION);
    await outcome.settled;
    expect(seen).toHaveLength(2);
    expect(seen[0]).toEqual(seen[1]);
  });

  test("validation rejections are surfaced, not retried", async () => {
    let calls = 0;
    const queue = new SubmissionQueue(async () => {
      calls += 1;
      throw new RejectedError(400, "unknown subtype");
    }, 5);
    const outcome = await queue.submit(SUBMISSION);
    expect(outcome.status).toBe("rejected");
    expect(outcome.error).toMatch("unknown subtype");
    expect(queue.bufferedCount).toBe(0);
    await new Promise((r) => setTimeout(r, 30));
    expect(calls).toBe(1);
  });

  test("multiple buffered submissions all drain", async () => {
    let up = false;
    const posted: AnnotationSubmission[] = [];
    const queue = new SubmissionQueue(async (s) => {
      if (!up) {
        throw new Error("down");
      }
      posted.push(s);
      return okResponse(s);
    }, 5);
    const a = await queue.submit({ ...SUBMISSION, ref_index: 1 });
    const b = await queue.submit({ ...SUBMISSION, ref_index: 2 });
    expect(queue.bufferedCount).toBe(2);
    up = true;
    await Promise.all([a.settled, b.settled]);
    expect(posted.map((p) => p.ref_index).sort()).toEqual([1, 2]);
    expect(queue.bufferedCount).toBe(0);
  });

  test("state change callback reports the buffer size", async () => {
    const sizes: number[] = [];
    let up = false;
    const queue = new SubmissionQueue(async (s) => {
      if (!up) {
        throw new Error("down");
      }
      return okResponse(s);
    }, 5);
    queue.onstatechange = (n) => sizes.push(n);
    const outcome = await queue.submit(SUBMISSION);
    up = true;
    await outcome.settled;
    expect(sizes[0]).toBe(1);
    expect(sizes[sizes.length - 1]).toBe(0);
  });
});
