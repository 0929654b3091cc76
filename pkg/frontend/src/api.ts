/** Typed client for the /api/v1 control surface. */

export interface PortInfo {
  name: string;
  doc: string;
}

export interface ConfigSlotInfo {
  name: string;
  doc: string;
  required: boolean;
}

export interface TopologyNode {
  id: string;
  class: string;
  state: string;
  doc: string;
  configs: string[];
  inputs: PortInfo[];
  outputs: PortInfo[];
  config_slots: ConfigSlotInfo[];
}

export interface TopologyEdge {
  id: string;
  src: { node: string; output: number | null };
  dst: { node: string; kind: string; index: number };
  buffer_id: string;
}

export interface TopologyView {
  id: string;
  slots: string[];
}

export interface Topology {
  revision: number;
  nodes: TopologyNode[];
  edges: TopologyEdge[];
  views: TopologyView[];
}

export interface BufferRecord {
  seq: number;
  timestamp: number;
  origin: string;
  text: string;
}

export interface BufferPage {
  buffer_id: string;
  records: BufferRecord[];
  next_seq: number;
  total: number;
}

export interface EngineEvent {
  seq: number;
  kind: string;
  timestamp: number;
  node_id?: string;
  buffer_id?: string;
  range_start?: number;
  range_end?: number;
  detail?: string;
}

export interface EdgeRequest {
  src_node: string;
  src_output: number | null;
  dst_node: string;
  dst_kind: string;
  dst_index: number;
}

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
  }
}

async function unwrap<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = (await response.json()) as { detail?: string };
      if (body.detail) detail = body.detail;
    } catch {
      // non-JSON error body, keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(readonly base: string = "") {}

  private url(path: string): string {
    return `${this.base}/api/v1${path}`;
  }

  topology(): Promise<Topology> {
    return fetch(this.url("/topology")).then((r) => unwrap<Topology>(r));
  }

  bufferPage(bufferId: string, fromSeq = 0, limit = 100): Promise<BufferPage> {
    const query = new URLSearchParams({ from_seq: String(fromSeq), limit: String(limit) });
    return fetch(this.url(`/buffers/${encodeURIComponent(bufferId)}?${query}`)).then((r) =>
      unwrap<BufferPage>(r),
    );
  }

  /** Bounded catch-up read of the engine event log (live tail uses EventSource). */
  async eventsSince(fromSeq: number, maxEvents: number): Promise<EngineEvent[]> {
    const query = new URLSearchParams({
      from_seq: String(fromSeq),
      live: "false",
      max_events: String(maxEvents),
    });
    const response = await fetch(this.url(`/events?${query}`));
    if (!response.ok) throw new ApiError(response.status, response.statusText);
    return parseSse(await response.text());
  }

  eventStreamUrl(fromSeq: number): string {
    return this.url(`/events?from_seq=${fromSeq}`);
  }

  inject(bufferId: string, text: string): Promise<{ buffer_id: string; seq: number }> {
    return this.post("/inject", { buffer_id: bufferId, text });
  }

  addEdge(edge: EdgeRequest): Promise<{ revision: number }> {
    return this.post("/edges", edge);
  }

  setConfig(node: string, index: number, value: string): Promise<{ revision: number }> {
    return this.post("/config", { node, index, value });
  }

  commit(path?: string): Promise<{ path: string; bytes_written: number }> {
    return this.post("/commit", path ? { path } : {});
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return fetch(this.url(path), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    }).then((r) => unwrap<T>(r));
  }
}

/** Parse a complete SSE body into its data payloads. */
export function parseSse(body: string): EngineEvent[] {
  const events: EngineEvent[] = [];
  for (const line of body.split("\n")) {
    if (line.startsWith("data: ")) {
      events.push(JSON.parse(line.slice("data: ".length)) as EngineEvent);
    }
  }
  return events;
}
