// Session state machine for one expert working the queue. At most one
// submission is in flight; every state transition is driven by a server
// response, never inferred locally.

import { ApiClient, isDone, type Label, type QueueItem } from "./api.js";

export type SessionState =
  | { kind: "loading" }
  | { kind: "labeling"; item: QueueItem; notice: string | null }
  | { kind: "submitting"; item: QueueItem }
  | { kind: "offline"; item: QueueItem; pendingLabel: Label; message: string }
  | { kind: "done" };

export type StateListener = (state: SessionState) => void;

export class ExpertSession {
  state: SessionState = { kind: "loading" };

  constructor(
    private readonly api: ApiClient,
    readonly expertId: string,
    private readonly listener: StateListener = () => {}
  ) {}

  private setState(state: SessionState): void {
    this.state = state;
    this.listener(state);
  }

  async start(): Promise<void> {
    await this.advance(null);
  }

  private async advance(notice: string | null): Promise<void> {
    this.setState({ kind: "loading" });
    const next = await this.api.nextItem(this.expertId);
    if (isDone(next)) {
      this.setState({ kind: "done" });
    } else {
      this.setState({ kind: "labeling", item: next, notice });
    }
  }

  /** Submit a label for the displayed item; ignored unless labeling. */
  async submit(label: Label): Promise<void> {
    if (this.state.kind !== "labeling") {
      return; // one in-flight submission at a time
    }
    const item = this.state.item;
    this.setState({ kind: "submitting", item });
    let result;
    try {
      result = await this.api.submitLabel(this.expertId, item.item_id, label);
    } catch (err) {
      this.setState({
        kind: "offline",
        item,
        pendingLabel: label,
        message: "network failure: the label was not recorded",
      });
      return;
    }
    if (result.status === 409) {
      const detail = (result.body as { detail?: string }).detail ?? "conflicting submission";
      await this.advance(`rejected: ${detail}`);
      return;
    }
    if (result.status >= 400) {
      const detail = (result.body as { detail?: string }).detail ?? `status ${result.status}`;
      await this.advance(`error: ${detail}`);
      return;
    }
    await this.advance(null);
  }

  /** Retry the submission that failed while offline. */
  async retry(): Promise<void> {
    if (this.state.kind !== "offline") {
      return;
    }
    const { item, pendingLabel } = this.state;
    this.setState({ kind: "labeling", item, notice: null });
    await this.submit(pendingLabel);
  }
}
