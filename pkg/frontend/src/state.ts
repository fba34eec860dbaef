/** Search view state: one in-flight request at a time, stale responses discarded. */

import { ApiError, ChannelMode, SearchApi, SearchHit, SearchResponse } from "./api.js";

export interface SearchViewState {
    queryText: string;
    channel: ChannelMode;
    alpha: number;
    /** empty string = auto-detect (no lang parameter sent) */
    language: string;
    loading: boolean;
    error: string | null;
    /** results of the last completed request, or null before the first one */
    results: SearchHit[] | null;
    lastResponse: SearchResponse | null;
}

export type Listener = (state: SearchViewState) => void;

export class SearchStore {
    private requestSeq = 0;
    private controller: AbortController | null = null;
    private listeners: Listener[] = [];

    state: SearchViewState = {
        queryText: "",
        channel: "fused",
        alpha: 0.5,
        language: "",
        loading: false,
        error: null,
        results: null,
        lastResponse: null,
    };

    constructor(private readonly api: SearchApi) {}

    subscribe(listener: Listener): void {
        this.listeners.push(listener);
    }

    private update(patch: Partial<SearchViewState>): void {
        this.state = { ...this.state, ...patch };
        for (const listener of this.listeners) {
            listener(this.state);
        }
    }

    setQuery(text: string): void {
        this.update({ queryText: text });
    }

    canSubmit(): boolean {
        return this.state.queryText.trim().length > 0;
    }

    /** Switching language never clears the query box. */
    selectLanguage(tag: string): void {
        this.update({ language: tag });
    }

    dismissError(): void {
        this.update({ error: null });
    }

    /** Re-issues the last query under the new mode (when there is one). */
    async toggleChannel(mode: ChannelMode): Promise<void> {
        this.update({ channel: mode });
        if (this.canSubmit() && this.state.lastResponse !== null) {
            await this.submit();
        }
    }

    async setAlpha(alpha: number): Promise<void> {
        this.update({ alpha });
        if (this.state.channel === "fused" && this.state.lastResponse !== null && this.canSubmit()) {
            await this.submit();
        }
    }

    async submit(): Promise<void> {
        if (!this.canSubmit()) {
            return;
        }
        // newer submissions supersede older ones
        this.controller?.abort();
        const controller = new AbortController();
        this.controller = controller;
        const seq = ++this.requestSeq;
        this.update({ loading: true });
        try {
            const response = await this.api.search(
                {
                    q: this.state.queryText.trim(),
                    channel: this.state.channel,
                    alpha: this.state.alpha,
                    lang: this.state.language || undefined,
                },
                controller.signal,
            );
            if (seq !== this.requestSeq) {
                return; // stale response: a newer request has been issued
            }
            this.update({
                loading: false,
                error: null,
                results: response.results,
                lastResponse: response,
            });
        } catch (err) {
            if (controller.signal.aborted) {
                return; // superseded; the newer request owns the view now
            }
            if (seq !== this.requestSeq) {
                return;
            }
            const message =
                err instanceof ApiError
                    ? `Search failed (${err.status}): ${err.message}`
                    : `Search failed: ${err instanceof Error ? err.message : String(err)}`;
            // previous results stay on screen; the error is shown alongside
            this.update({ loading: false, error: message });
        }
    }
}
