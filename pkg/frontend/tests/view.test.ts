// @vitest-environment jsdom
import { beforeEach, describe, expect, test, vi } from "vitest";

import { AnnotateView, renderProgress, renderQueue } from "../src/view";
import type { QueueItem } from "../src/types";
import { DETAIL, SCHEMA } from "./fixtures";

function queueItem(i: number, confidence: number): QueueItem {
  return {
    utterance_id: `u${i}`,
    system_id: "demo",
    ref_index: i,
    ref_word: `ref${i}`,
    hyp_words: [`hyp${i}`],
    segment_kind: "substitution",
    category: "Cotx",
    subtype: "3.2",
    confidence,
    rationale: `why ${i}`,
  };
}

beforeEach(() => {
  document.body.innerHTML = '<div id="main"></div>';
});

describe("renderQueue", () => {
  test("three pending rows with confidence badges", () => {
    const main = document.getElementById("main")!;
    const items = [queueItem(1, 0.2), queueItem(2, 0.5), queueItem(3, 0.9)];
    renderQueue(main, items, 3, "/export", () => undefined);
    const rows = main.querySelectorAll(".queue-row");
    expect(rows).toHaveLength(3);
    const badges = [...main.querySelectorAll(".confidence-badge")].map(
      (b) => b.textContent,
    );
    expect(badges).toEqual(["0.20", "0.50", "0.90"]);
  });

  test("empty queue shows the done state with an export link", () => {
    const main = document.getElementById("main")!;
    renderQueue(main, [], 0, "/export", () => undefined);
    expect(main.querySelector(".done-state")).not.toBeNull();
    const link = main.querySelector<HTMLAnchorElement>(".export-link")!;
    expect(link.getAttribute("href")).toBe("/export");
  });

  test("clicking a row opens the candidate", () => {
    const main = document.getElementById("main")!;
    const onOpen = vi.fn();
    renderQueue(main, [queueItem(1, 0.2)], 1, "/export", onOpen);
    (main.querySelector(".queue-row") as HTMLElement).click();
    expect(onOpen).toHaveBeenCalledWith(
      expect.objectContaining({ utterance_id: "u1", ref_index: 1 }),
    );
  });
});

describe("renderProgress", () => {
  test("shows only server-reported numbers", () => {
    const header = document.createElement("div");
    renderProgress(
      header,
      {
        total_candidates: 14,
        auto_decided: 10,
        human_annotated: 2,
        pending: 2,
        log_records: 2,
        category_totals: { Lex: 5, Gram: 4, Cotx: 1, Fail: 2 },
      },
      1,
    );
    const text = header.textContent!;
    expect(text).toContain("2 pending");
    expect(text).toContain("12 / 14 labeled");
    expect(text).toContain("1 queued for retry");
  });
});

describe("AnnotateView", () => {
  function makeView(onSubmit = vi.fn(), onBack = vi.fn()) {
    const main = document.getElementById("main")!;
    const view = new AnnotateView(main, SCHEMA, DETAIL, { onSubmit, onBack });
    view.render();
    return { main, view, onSubmit, onBack };
  }

  test("highlights the error in both sentences and underlines cues", () => {
    const { main } = makeView();
    const refMarks = main.querySelectorAll(".reference mark.error");
    expect(refMarks).toHaveLength(1);
    expect(refMarks[0].textContent).toBe("programme");
    const hypMarks = main.querySelectorAll(".hypothesis mark.error");
    expect(hypMarks[0].textContent).toBe("problème");
    expect(main.querySelectorAll("u.cue").length).toBeGreaterThan(0);
  });

  test("subtype picker exposes exactly the schema subtypes", () => {
    const { main } = makeView();
    const labels = [...main.querySelectorAll(".picker button.subtype")].map(
      (b) => b.textContent!.split(" ")[1],
    );
    expect(labels.sort()).toEqual(
      ["1.1", "1.2", "2.1", "2.2", "3.1", "3.2", "3.3", "4.1", "4.2", "4.3"].sort(),
    );
  });

  test("preselects the suggestion and Enter confirms it", () => {
    const { view, onSubmit } = makeView();
    view.handleKey(new KeyboardEvent("keydown", { key: "Enter" }));
    expect(onSubmit).toHaveBeenCalledWith("Fail", "4.3", "");
  });

  test("digit shortcuts override before confirming", () => {
    const { view, onSubmit } = makeView();
    view.handleKey(new KeyboardEvent("keydown", { key: "3" }));
    view.handleKey(new KeyboardEvent("keydown", { key: "1" }));
    view.handleKey(new KeyboardEvent("keydown", { key: "Enter" }));
    expect(onSubmit).toHaveBeenCalledWith("Cotx", "3.1", "");
  });

  test("escape resets to the suggestion", () => {
    const { view, onSubmit } = makeView();
    view.handleKey(new KeyboardEvent("keydown", { key: "2" }));
    view.handleKey(new KeyboardEvent("keydown", { key: "Escape" }));
    view.handleKey(new KeyboardEvent("keydown", { key: "Enter" }));
    expect(onSubmit).toHaveBeenCalledWith("Fail", "4.3", "");
  });

  test("server rejection text lands in the error box", () => {
    const { main, view } = makeView();
    view.showError("subtype 5.1 belongs to nothing");
    expect(main.querySelector(".error-box")!.textContent).toContain("5.1");
  });

  test("deletion candidates render a gap marker", () => {
    const main = document.getElementById("main")!;
    const detail = structuredClone(DETAIL);
    detail.candidate.hyp_words = [];
    detail.candidate.hyp_indices = [];
    detail.candidate.hyp_gap_index = 3;
    const view = new AnnotateView(main, SCHEMA, detail, {
      onSubmit: vi.fn(),
      onBack: vi.fn(),
    });
    view.render();
    expect(main.querySelector(".hypothesis mark.gap")).not.toBeNull();
  });
});
