/** Typed client for the /v1 search API. */

export type ChannelMode = "ocr" | "transcript" | "fused";

export interface SearchHit {
    rank: number;
    video_id: string;
    title: string;
    domain: string | null;
    duration_s: number | null;
    score: number;
    matched_terms: string[];
}

export interface SearchResponse {
    query: string;
    effective_query: string;
    channel: string;
    alpha: number;
    results: SearchHit[];
}

export interface VideoDetail {
    video_id: string;
    title: string;
    domain: string;
    duration_s: number;
    caption: string | null;
    ocr_preview: string;
    transcript_preview: string;
}

export interface HealthInfo {
    status: string;
    n_videos: number;
    index_fingerprint: string;
}

export interface SearchParams {
    q: string;
    channel: ChannelMode;
    alpha: number;
    /** BCP-47-ish tag; empty string means auto-detect (parameter omitted). */
    lang?: string;
    topK?: number;
}

export class ApiError extends Error {
    constructor(public readonly status: number, message: string) {
        super(message);
        this.name = "ApiError";
    }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class SearchApi {
    constructor(
        private readonly baseUrl: string,
        private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
    ) {}

    private async request<T>(path: string, signal?: AbortSignal): Promise<T> {
        const response = await this.fetchFn(`${this.baseUrl}${path}`, { signal });
        let body: unknown = null;
        try {
            body = await response.json();
        } catch {
            body = null;
        }
        if (!response.ok) {
            const detail =
                body && typeof body === "object" && "error" in body
                    ? String((body as { error: unknown }).error)
                    : `request failed with status ${response.status}`;
            throw new ApiError(response.status, detail);
        }
        return body as T;
    }

    searchUrl(params: SearchParams): string {
        const query = new URLSearchParams({ q: params.q });
        query.set("channel", params.channel);
        query.set("alpha", String(params.alpha));
        if (params.lang) {
            query.set("lang", params.lang);
        }
        if (params.topK !== undefined) {
            query.set("top_k", String(params.topK));
        }
        return `/v1/search?${query.toString()}`;
    }

    search(params: SearchParams, signal?: AbortSignal): Promise<SearchResponse> {
        return this.request<SearchResponse>(this.searchUrl(params), signal);
    }

    video(videoId: string, signal?: AbortSignal): Promise<VideoDetail> {
        return this.request<VideoDetail>(`/v1/videos/${encodeURIComponent(videoId)}`, signal);
    }

    health(signal?: AbortSignal): Promise<HealthInfo> {
        return this.request<HealthInfo>("/v1/health", signal);
    }
}
