/**
 * App bootstrap: read the annotator id and protocol from the query string,
 * pull the next work item, render the matching view, submit, repeat.
 * In-progress scores survive fetch failures; the error banner retries.
 */

import { ApiClient, PROTOCOL_ANNOTATE, PROTOCOL_EVAL } from "./api.js";
import { renderAnnotate } from "./annotate.js";
import { renderEval } from "./eval.js";
import { banner } from "./render.js";

type Keyed = { handleKey(key: string): void };

export async function boot(doc: Document, client: ApiClient): Promise<void> {
  const params = new URLSearchParams(doc.location?.search ?? "");
  const annotator = params.get("annotator") ?? "";
  const protocol = params.get("protocol") === PROTOCOL_EVAL ? PROTOCOL_EVAL : PROTOCOL_ANNOTATE;
  const mount = doc.getElementById("app") ?? doc.body;

  if (!annotator) {
    mount.textContent = "Add ?annotator=YOUR_ID&protocol=annotate3step|eval4aspect to the URL.";
    return;
  }

  let activeView: Keyed | null = null;
  doc.addEventListener("keydown", (event) => {
    const target = event.target as HTMLElement | null;
    if (target && ("value" in target || target.isContentEditable)) return;
    activeView?.handleKey((event as KeyboardEvent).key);
  });

  async function loadNext(): Promise<void> {
    mount.textContent = "";
    try {
      if (protocol === PROTOCOL_ANNOTATE) {
        const item = await client.nextAnnotation(annotator);
        if (!item) {
          mount.textContent = "All pairs annotated. Thank you.";
          return;
        }
        const view = renderAnnotate(doc, item, annotator, async (payload) => {
          try {
            await client.submitAnnotation(payload);
            activeView = null;
            await loadNext();
          } catch (error) {
            mount.prepend(banner(doc, `submit failed: ${error}`));
          }
        });
        activeView = view;
        mount.appendChild(view.element);
      } else {
        const item = await client.nextEval(annotator);
        if (!item) {
          mount.textContent = "All assignments rated. Thank you.";
          return;
        }
        const view = renderEval(doc, item, annotator, async (payload) => {
          try {
            await client.submitRating(payload);
            activeView = null;
            await loadNext();
          } catch (error) {
            mount.prepend(banner(doc, `submit failed: ${error}`));
          }
        });
        activeView = view;
        mount.appendChild(view.element);
      }
    } catch (error) {
      // fetch failure: keep whatever view exists (in-progress scores stay),
      // show a retry banner
      mount.prepend(banner(doc, `request failed: ${error}`, () => void loadNext()));
    }
  }

  await loadNext();
}

declare const window: (Window & typeof globalThis) | undefined;

if (typeof window !== "undefined" && window?.document?.getElementById("app")) {
  void boot(window.document, new ApiClient(""));
}
