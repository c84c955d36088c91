// App shell: hash routing between the queue and one candidate at a time.
//   #/            queue
//   #/c/u/s/i     candidate (utterance u, system s, reference index i)

import { ApiClient, RejectedError } from "./api";
import { Store } from "./store";
import { AnnotateView, renderProgress, renderQueue } from "./view";
import type { CandidateKey } from "./types";

const api = new ApiClient("");
const store = new Store(api);

let annotateView: AnnotateView | null = null;

function parseRoute(): CandidateKey | null {
  const match = window.location.hash.match(/^#\/c\/([^/]+)\/([^/]+)\/(\d+)$/);
  if (!match) {
    return null;
  }
  return {
    utterance_id: decodeURIComponent(match[1]),
    system_id: decodeURIComponent(match[2]),
    ref_index: Number(match[3]),
  };
}

function goTo(key: CandidateKey | null): void {
  window.location.hash = key
    ? `#/c/${encodeURIComponent(key.utterance_id)}/${encodeURIComponent(key.system_id)}/${key.ref_index}`
    : "#/";
}

async function renderRoute(): Promise<void> {
  const main = document.getElementById("main")!;
  const header = document.getElementById("progress")!;
  renderProgress(header, store.progress, store.submissions.bufferedCount);
  const key = parseRoute();
  if (key === null) {
    annotateView = null;
    renderQueue(main, store.queue, store.pending, api.exportUrl(), goTo);
    return;
  }
  try {
    const detail = await api.candidate(key);
    annotateView = new AnnotateView(main, store.schema!, detail, {
      onBack: () => goTo(null),
      onSubmit: (category, subtype, note) => {
        void submit(key, category, subtype, note);
      },
    });
    annotateView.render();
  } catch (err) {
    if (err instanceof RejectedError && err.status === 404) {
      goTo(null);
      return;
    }
    throw err;
  }
}

async function submit(
  key: CandidateKey,
  category: string,
  subtype: string,
  note: string,
): Promise<void> {
  const outcome = await store.submitDecision(key, category, subtype, note);
  if (outcome.status === "rejected") {
    annotateView?.showError(outcome.error ?? "rejected");
    return;
  }
  if (outcome.status === "queued") {
    annotateView?.showError(
      "server unreachable; decision buffered and will be retried",
    );
  }
  goTo(store.nextAfter(key));
}

async function boot(): Promise<void> {
  await store.init();
  store.onchange = () => {
    const header = document.getElementById("progress")!;
    renderProgress(header, store.progress, store.submissions.bufferedCount);
    if (parseRoute() === null) {
      const main = document.getElementById("main")!;
      renderQueue(main, store.queue, store.pending, api.exportUrl(), goTo);
    }
  };
  const annotatorInput = document.getElementById(
    "annotator",
  ) as HTMLInputElement;
  annotatorInput.value = store.annotator;
  annotatorInput.addEventListener("change", () => {
    store.annotator = annotatorInput.value || "expert";
  });
  window.addEventListener("hashchange", () => void renderRoute());
  window.addEventListener("keydown", (event) => {
    annotateView?.handleKey(event);
  });
  await renderRoute();
}

void boot();
