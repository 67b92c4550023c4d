/** DOM builders shared by both protocol views. */

const PY_KEYWORDS = new Set([
  "def", "return", "if", "elif", "else", "for", "while", "try", "except",
  "finally", "with", "as", "import", "from", "class", "raise", "assert",
  "lambda", "yield", "async", "await", "pass", "break", "continue", "in",
  "is", "not", "and", "or", "None", "True", "False", "del", "global",
]);

function highlightLine(doc: Document, line: string): HTMLElement {
  const span = doc.createElement("span");
  // token-level coloring: keywords, strings, comments
  const parts = line.split(/(\s+|[^\w\s]+)/);
  let inComment = false;
  for (const part of parts) {
    if (part === "") continue;
    const piece = doc.createElement("span");
    piece.textContent = part;
    if (inComment || part.startsWith("#")) {
      piece.className = "tok-comment";
      inComment = true;
    } else if (PY_KEYWORDS.has(part)) {
      piece.className = "tok-keyword";
    } else if (/^["']/.test(part)) {
      piece.className = "tok-string";
    }
    span.appendChild(piece);
  }
  return span;
}

export interface CodeViewer {
  element: HTMLElement;
  setSelectable(selectable: boolean): void;
  markSpan(start: number, end: number, cls: string): void;
  clearMarks(cls: string): void;
}

export function renderCodeViewer(
  doc: Document,
  code: string,
  onLineClick: (line: number) => void,
): CodeViewer {
  const container = doc.createElement("pre");
  container.className = "code-viewer";
  const rows: HTMLElement[] = [];
  code.split("\n").forEach((text, i) => {
    const row = doc.createElement("div");
    row.className = "code-line";
    row.dataset.line = String(i + 1);
    const number = doc.createElement("span");
    number.className = "line-number";
    number.textContent = String(i + 1).padStart(3, " ");
    row.appendChild(number);
    row.appendChild(highlightLine(doc, text));
    row.addEventListener("click", () => onLineClick(i + 1));
    container.appendChild(row);
    rows.push(row);
  });
  return {
    element: container,
    setSelectable(selectable) {
      container.classList.toggle("selectable", selectable);
    },
    markSpan(start, end, cls) {
      for (let line = start; line <= end && line <= rows.length; line++) {
        rows[line - 1].classList.add(cls);
      }
    },
    clearMarks(cls) {
      for (const row of rows) row.classList.remove(cls);
    },
  };
}

export function renderDocstring(doc: Document, text: string): HTMLElement {
  const panel = doc.createElement("pre");
  panel.className = "docstring-panel";
  panel.textContent = text;
  return panel;
}

/** Character offsets of the current selection inside the docstring panel. */
export function selectionOffsets(doc: Document, panel: HTMLElement): [number, number] | null {
  const selection = doc.getSelection ? doc.getSelection() : null;
  if (!selection || selection.rangeCount === 0) return null;
  const range = selection.getRangeAt(0);
  const textNode = panel.firstChild;
  if (!textNode || range.startContainer !== textNode || range.endContainer !== textNode) {
    return null;
  }
  if (range.startOffset === range.endOffset) return null;
  return [range.startOffset, range.endOffset];
}

export function scoreButtons(
  doc: Document,
  max: number,
  onPick: (value: number) => void,
): { element: HTMLElement; setActive(value: number | null): void } {
  const group = doc.createElement("div");
  group.className = "score-buttons";
  const buttons: HTMLButtonElement[] = [];
  for (let v = 0; v <= max; v++) {
    const button = doc.createElement("button");
    button.type = "button";
    button.textContent = String(v);
    button.addEventListener("click", () => onPick(v));
    group.appendChild(button);
    buttons.push(button);
  }
  return {
    element: group,
    setActive(value) {
      buttons.forEach((b, i) => b.classList.toggle("active", value === i));
    },
  };
}

export function banner(doc: Document, message: string, onRetry?: () => void): HTMLElement {
  const bar = doc.createElement("div");
  bar.className = "error-banner";
  const text = doc.createElement("span");
  text.textContent = message;
  bar.appendChild(text);
  if (onRetry) {
    const retry = doc.createElement("button");
    retry.type = "button";
    retry.textContent = "retry";
    retry.addEventListener("click", onRetry);
    bar.appendChild(retry);
  }
  return bar;
}
