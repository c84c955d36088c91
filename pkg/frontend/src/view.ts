// DOM renderers. Every number shown comes from the server (/queue pending
// count, /progress counters); the views never count labels themselves.

import { renderableTokens } from "./highlight";
import { ShortcutPicker } from "./keyboard";
import {
  candidateKey,
  type CandidateDetail,
  type CandidateKey,
  type Progress,
  type QueueItem,
  type Schema,
} from "./types";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export function renderProgress(container: HTMLElement, progress: Progress | null,
                               buffered: number): void {
  container.textContent = "";
  if (!progress) {
    return;
  }
  const finals =
    progress.total_candidates - progress.pending;
  container.append(
    el("span", "stat", `${progress.pending} pending`),
    el("span", "stat", `${finals} / ${progress.total_candidates} labeled`),
    el("span", "stat", `${progress.auto_decided} auto`),
    el("span", "stat", `${progress.human_annotated} human`),
  );
  if (buffered > 0) {
    container.append(
      el("span", "stat stat-retry", `${buffered} queued for retry`),
    );
  }
}

export function renderQueue(
  container: HTMLElement,
  items: QueueItem[],
  pending: number,
  exportUrl: string,
  onOpen: (key: CandidateKey) => void,
): void {
  container.textContent = "";
  if (pending === 0) {
    const done = el("div", "done-state");
    done.append(el("h2", undefined, "All candidates adjudicated"));
    const link = el("a", "export-link", "Download the effective labels");
    link.setAttribute("href", exportUrl);
    done.append(link);
    container.append(done);
    return;
  }
  container.append(
    el("h2", undefined, `Adjudication queue (${pending} pending)`),
  );
  const list = el("ul", "queue-list");
  for (const item of items) {
    const row = el("li", "queue-row");
    row.dataset.key = candidateKey(item);
    const badge = el(
      "span",
      "confidence-badge",
      item.confidence.toFixed(2),
    );
    badge.title = "rule confidence (weakest first)";
    const words = el(
      "span",
      "queue-words",
      `${item.ref_word} -> ${item.hyp_words.join(" ") || "(deleted)"}`,
    );
    const tag = el(
      "span",
      "queue-suggestion",
      `${item.category} ${item.subtype}`,
    );
    row.append(badge, words, tag, el("span", "queue-why", item.rationale));
    row.addEventListener("click", () => onOpen(item));
    list.append(row);
  }
  container.append(list);
}

function sentence(
  target: HTMLElement,
  tokens: { surface: string; normalized: string }[],
  span: number[],
  cueWords: string[],
  gapIndex: number | null,
): void {
  const rendered = renderableTokens(tokens, span, cueWords);
  rendered.forEach((token, i) => {
    if (gapIndex === i) {
      target.append(el("mark", "gap", "*"), document.createTextNode(" "));
    }
    const node = token.highlighted
      ? el("mark", "error", token.text)
      : token.cue
        ? el("u", "cue", token.text)
        : document.createTextNode(token.text);
    target.append(node);
    if (i < rendered.length - 1) {
      target.append(document.createTextNode(" "));
    }
  });
  if (gapIndex !== null && gapIndex >= rendered.length) {
    target.append(document.createTextNode(" "), el("mark", "gap", "*"));
  }
}

export interface AnnotateCallbacks {
  onSubmit: (category: string, subtype: string, note: string) => void;
  onBack: () => void;
}

export class AnnotateView {
  readonly picker: ShortcutPicker;
  private readonly schema: Schema;
  private readonly detail: CandidateDetail;
  private readonly callbacks: AnnotateCallbacks;
  private readonly root: HTMLElement;
  private noteInput: HTMLInputElement | null = null;
  private errorBox: HTMLElement | null = null;

  constructor(
    root: HTMLElement,
    schema: Schema,
    detail: CandidateDetail,
    callbacks: AnnotateCallbacks,
  ) {
    this.root = root;
    this.schema = schema;
    this.detail = detail;
    this.callbacks = callbacks;
    this.picker = new ShortcutPicker(schema);
    this.picker.select(detail.suggestion.category, detail.suggestion.subtype);
  }

  render(): void {
    const d = this.detail;
    this.root.textContent = "";
    const back = el("button", "back", "< queue");
    back.addEventListener("click", () => this.callbacks.onBack());
    this.root.append(back);

    const card = el("section", "candidate-card");
    card.append(
      el(
        "h2",
        undefined,
        `${d.candidate.utterance_id} / ${d.candidate.system_id} / token ${d.candidate.ref_index}`,
      ),
    );

    if (d.neighbors.previous) {
      card.append(
        el("p", "neighbor", `... ${d.neighbors.previous.reference}`),
      );
    }
    const refLine = el("p", "sentence reference");
    refLine.append(el("span", "line-label", "reference "));
    sentence(refLine, d.reference_tokens, [d.candidate.ref_index], d.cue_words, null);
    card.append(refLine);

    const hypLine = el("p", "sentence hypothesis");
    hypLine.append(el("span", "line-label", "hypothesis "));
    sentence(
      hypLine,
      d.hypothesis_tokens,
      d.candidate.hyp_indices,
      d.cue_words,
      d.candidate.hyp_indices.length === 0 ? d.candidate.hyp_gap_index : null,
    );
    card.append(hypLine);
    if (d.neighbors.next) {
      card.append(el("p", "neighbor", `${d.neighbors.next.reference} ...`));
    }

    const cues = el("p", "cues");
    cues.append(el("span", "line-label", "cues "));
    if (d.cue_words.length === 0) {
      cues.append(document.createTextNode("(none)"));
    }
    d.cue_words.forEach((w, i) => {
      cues.append(el("u", "cue", w));
      if (i < d.cue_words.length - 1) {
        cues.append(document.createTextNode(", "));
      }
    });
    card.append(cues);

    const suggestion = el("p", "suggestion-box");
    suggestion.append(
      el(
        "strong",
        undefined,
        `suggested: ${d.suggestion.category} ${d.suggestion.subtype}`,
      ),
      el(
        "span",
        "suggestion-conf",
        ` (confidence ${d.suggestion.confidence.toFixed(2)})`,
      ),
      el("br"),
      document.createTextNode(d.suggestion.rationale),
    );
    card.append(suggestion);
    this.root.append(card);

    this.root.append(this.renderPicker());

    const noteRow = el("div", "note-row");
    this.noteInput = el("input");
    this.noteInput.placeholder = "note (optional)";
    noteRow.append(this.noteInput);
    const submit = el("button", "submit", "Confirm (Enter)");
    submit.addEventListener("click", () => this.confirm());
    noteRow.append(submit);
    this.root.append(noteRow);

    this.errorBox = el("p", "error-box");
    this.root.append(this.errorBox);
    this.root.append(
      el(
        "p",
        "hint",
        "Keys: 1-4 category, then a digit for the subtype; Enter confirms; Esc resets to the suggestion.",
      ),
    );
  }

  private renderPicker(): HTMLElement {
    const panel = el("section", "picker");
    const selection = this.picker.selection;
    this.schema.categories.forEach((cat, ci) => {
      const group = el("div", "picker-category");
      const head = el(
        "button",
        selection.category === cat.id ? "cat selected" : "cat",
        `${ci + 1} ${cat.id}`,
      );
      head.title = cat.label;
      head.addEventListener("click", () => {
        this.picker.select(cat.id, null);
        this.rerenderPicker();
      });
      group.append(head);
      cat.subtypes.forEach((st, si) => {
        const selected =
          selection.category === cat.id && selection.subtype === st.id;
        const button = el(
          "button",
          selected ? "subtype selected" : "subtype",
          `${si + 1} ${st.id} ${st.label}`,
        );
        button.title = st.help;
        button.addEventListener("click", () => {
          this.picker.select(cat.id, st.id);
          this.rerenderPicker();
        });
        group.append(button);
      });
      panel.append(group);
    });
    return panel;
  }

  private rerenderPicker(): void {
    const existing = this.root.querySelector(".picker");
    if (existing) {
      existing.replaceWith(this.renderPicker());
    }
  }

  showError(message: string): void {
    if (this.errorBox) {
      this.errorBox.textContent = message;
    }
  }

  confirm(): void {
    const { category, subtype } = this.picker.selection;
    if (!category || !subtype) {
      this.showError("pick a category and subtype first");
      return;
    }
    this.callbacks.onSubmit(category, subtype, this.noteInput?.value ?? "");
  }

  handleKey(event: KeyboardEvent): void {
    if (event.target instanceof HTMLInputElement) {
      return;
    }
    if (event.key === "Enter") {
      event.preventDefault();
      this.confirm();
      return;
    }
    if (event.key === "Escape") {
      this.picker.select(
        this.detail.suggestion.category,
        this.detail.suggestion.subtype,
      );
      this.rerenderPicker();
      return;
    }
    if (this.picker.press(event.key)) {
      event.preventDefault();
      this.rerenderPicker();
    }
  }
}
