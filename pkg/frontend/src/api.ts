// Typed client for the adjudication HTTP API. All state lives on the
// server; this module only shuttles JSON.

export type Label = "A" | "B" | "C" | "D";

export interface QueueItem {
  item_id: string;
  anon_text: string;
  status: string;
  crowd_counts: Record<Label, number>;
}

export type NextResponse = QueueItem | { done: true };

export type SubmitOutcome = "recorded" | "resolved" | "conflict_resolved" | "dropped";

export interface GoldLabel {
  item_id: string;
  label: Label;
  provenance: string;
}

export interface SubmitResponse {
  outcome: SubmitOutcome;
  gold: GoldLabel | null;
}

export interface StatsResponse {
  kappa: number | null;
  percent_agreement: number | null;
  status_counts: Record<string, number>;
  resolved_by_label: Record<Label, number>;
  resolved_by_provenance: Record<string, number>;
  total: number;
}

export interface SubmitResult {
  status: number;
  body: SubmitResponse | { detail: string };
}

export function isDone(response: NextResponse): response is { done: true } {
  return (response as { done?: boolean }).done === true;
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  async nextItem(expert: string): Promise<NextResponse> {
    const response = await fetch(
      `${this.baseUrl}/api/queue/next?expert=${encodeURIComponent(expert)}`
    );
    if (!response.ok) {
      throw new Error(`queue/next failed with status ${response.status}`);
    }
    return (await response.json()) as NextResponse;
  }

  async submitLabel(expert: string, itemId: string, label: Label): Promise<SubmitResult> {
    const response = await fetch(
      `${this.baseUrl}/api/items/${encodeURIComponent(itemId)}/labels`,
      {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ expert, label }),
      }
    );
    return { status: response.status, body: await response.json() };
  }

  async stats(): Promise<StatsResponse> {
    const response = await fetch(`${this.baseUrl}/api/stats`);
    if (!response.ok) {
      throw new Error(`stats failed with status ${response.status}`);
    }
    return (await response.json()) as StatsResponse;
  }

  exportUrl(): string {
    return `${this.baseUrl}/api/export`;
  }
}
