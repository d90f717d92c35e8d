// Single-keystroke labeling: a/b/c/d submit the matching category.

import type { Label } from "./api.js";

const KEY_TO_LABEL: Record<string, Label> = { a: "A", b: "B", c: "C", d: "D" };

export function bindLabelKeys(
  target: EventTarget,
  onLabel: (label: Label) => void
): () => void {
  const handler = (event: Event) => {
    const key = (event as KeyboardEvent).key?.toLowerCase();
    if (key === undefined) {
      return;
    }
    const label = KEY_TO_LABEL[key];
    if (label !== undefined) {
      event.preventDefault();
      onLabel(label);
    }
  };
  target.addEventListener("keydown", handler);
  return () => target.removeEventListener("keydown", handler);
}
