/** Typed client for the captionlens HTTP API.
 *
 * Every response carries an X-Snapshot-Version header; the client tracks it
 * and notifies listeners when the server swaps to a new snapshot, so views
 * can refetch instead of mixing data from two versions.
 */

export interface ClusterSummary {
  cluster_id: number;
  size: number;
  terms: string[];
  order_position: number;
  representative_id: string;
}

export interface ClusterList {
  k: number;
  clusters: ClusterSummary[];
}

export interface CaptionInfo {
  text: string;
  token_count: number;
  word_count: number;
  model_id: string;
  prompt_id: string;
}

export interface ImageRecord {
  id: string;
  source_path: string;
  title: string;
  metadata: Record<string, unknown>;
  width_px: number;
  height_px: number;
  status: string;
  rejection_reason?: string;
  caption?: CaptionInfo;
  cluster_id?: number | null;
}

export interface PageOf<T> {
  page: number;
  page_size: number;
  total: number;
  items: T[];
}

export interface ClusterMembers extends PageOf<ImageRecord> {
  cluster_id: number;
  representative_id: string;
}

export interface Neighbor {
  image_id: string;
  score: number;
}

export interface Recommendations {
  seed_id: string;
  space: string;
  n: number;
  neighbors: Neighbor[];
  explanation_terms: string[];
}

export interface SearchHit {
  image_id: string;
  score: number;
  matched_terms: string[];
  snippet: string;
}

export interface SearchResponse {
  query: string;
  hits: SearchHit[];
}

export interface ProjectionPoint {
  image_id: string;
  x: number;
  y: number;
  cluster_id: number | null;
}

export interface Projection {
  explained_variance: number[];
  points: ProjectionPoint[];
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

type VersionListener = (version: string) => void;

export class ApiClient {
  private version: string | null = null;
  private listeners: VersionListener[] = [];

  constructor(readonly base: string = "") {}

  snapshotVersion(): string | null {
    return this.version;
  }

  onVersionChange(listener: VersionListener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((entry) => entry !== listener);
    };
  }

  private observe(version: string | null): void {
    if (version === null) return;
    if (this.version === null) {
      this.version = version;
      return;
    }
    if (version !== this.version) {
      this.version = version;
      for (const listener of this.listeners) listener(version);
    }
  }

  fileUrl(id: string): string {
    return `${this.base}/api/images/${encodeURIComponent(id)}/file`;
  }

  thumbnailUrl(id: string): string {
    return `${this.base}/api/images/${encodeURIComponent(id)}/thumbnail`;
  }

  private async get<T>(
    path: string,
    params: Record<string, string> = {},
    signal?: AbortSignal,
  ): Promise<T> {
    const query = new URLSearchParams(params).toString();
    const url = `${this.base}${path}${query ? `?${query}` : ""}`;
    const res = await fetch(url, { signal });
    this.observe(res.headers.get("X-Snapshot-Version"));
    if (!res.ok) {
      let code = "error";
      let message = `${res.status}`;
      try {
        const body = await res.json();
        if (body && typeof body.code === "string") code = body.code;
        if (body && typeof body.message === "string") message = body.message;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(res.status, code, message);
    }
    return res.json() as Promise<T>;
  }

  clusters(signal?: AbortSignal): Promise<ClusterList> {
    return this.get("/api/clusters", {}, signal);
  }

  clusterImages(
    clusterId: number,
    page = 1,
    pageSize = 60,
    signal?: AbortSignal,
  ): Promise<ClusterMembers> {
    return this.get(
      `/api/clusters/${clusterId}/images`,
      { page: String(page), page_size: String(pageSize) },
      signal,
    );
  }

  image(id: string, signal?: AbortSignal): Promise<ImageRecord> {
    return this.get(`/api/images/${encodeURIComponent(id)}`, {}, signal);
  }

  recommendations(id: string, n: number, signal?: AbortSignal): Promise<Recommendations> {
    return this.get(
      `/api/images/${encodeURIComponent(id)}/recommendations`,
      { n: String(n) },
      signal,
    );
  }

  search(q: string, limit = 20, signal?: AbortSignal): Promise<SearchResponse> {
    return this.get("/api/search", { q, limit: String(limit) }, signal);
  }

  projection(signal?: AbortSignal): Promise<Projection> {
    return this.get("/api/projection", {}, signal);
  }
}
