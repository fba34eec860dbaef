/** DOM rendering: result cards, matched-term highlighting, error banner, detail pane. */

import { SearchHit, SearchResponse, VideoDetail } from "./api.js";
import { SearchViewState } from "./state.js";

function el<K extends keyof HTMLElementTagNameMap>(
    tag: K,
    className?: string,
    text?: string,
): HTMLElementTagNameMap[K] {
    const node = document.createElement(tag);
    if (className) {
        node.className = className;
    }
    if (text !== undefined) {
        node.textContent = text;
    }
    return node;
}

function formatDuration(seconds: number | null): string {
    if (seconds === null) {
        return "";
    }
    const minutes = Math.floor(seconds / 60);
    const rest = Math.round(seconds % 60);
    return `${minutes}:${String(rest).padStart(2, "0")}`;
}

/** Title with <mark> around words that are matched query terms (and only those). */
export function highlightTitle(title: string, matchedTerms: string[]): DocumentFragment {
    const matched = new Set(matchedTerms.map((t) => t.toLowerCase()));
    const fragment = document.createDocumentFragment();
    for (const [i, word] of title.split(" ").entries()) {
        if (i > 0) {
            fragment.append(" ");
        }
        const bare = word.toLowerCase().replace(/^[^\p{L}\p{N}]+|[^\p{L}\p{N}]+$/gu, "");
        if (bare && matched.has(bare)) {
            fragment.append(el("mark", "hl", word));
        } else {
            fragment.append(word);
        }
    }
    return fragment;
}

function resultCard(hit: SearchHit, onSelect: (videoId: string) => void): HTMLElement {
    const card = el("article", "result-card");
    card.dataset.videoId = hit.video_id;

    const heading = el("h3", "result-title");
    heading.append(`${hit.rank}. `);
    heading.append(highlightTitle(hit.title, hit.matched_terms));
    card.append(heading);

    const meta = el("div", "result-meta");
    meta.append(el("span", "badge domain", hit.domain ?? "?"));
    meta.append(el("span", "badge duration", formatDuration(hit.duration_s)));
    meta.append(el("span", "badge score", hit.score.toFixed(4)));
    card.append(meta);

    const terms = el("div", "matched-terms");
    for (const term of hit.matched_terms) {
        terms.append(el("mark", "hl term-chip", term));
    }
    card.append(terms);

    card.addEventListener("click", () => onSelect(hit.video_id));
    return card;
}

/** Cards appear in exactly the order of the response; no client-side sorting. */
export function renderResults(
    container: HTMLElement,
    response: SearchResponse | null,
    onSelect: (videoId: string) => void = () => undefined,
): void {
    container.textContent = "";
    if (response === null) {
        return;
    }
    if (response.results.length === 0) {
        container.append(el("p", "empty", "No matching videos."));
        return;
    }
    for (const hit of response.results) {
        container.append(resultCard(hit, onSelect));
    }
}

export function renderError(banner: HTMLElement, message: string | null): void {
    banner.textContent = "";
    if (message === null) {
        banner.hidden = true;
        return;
    }
    banner.hidden = false;
    banner.append(el("span", "error-text", message));
    const dismiss = el("button", "error-dismiss", "dismiss");
    dismiss.type = "button";
    banner.append(dismiss);
}

export function renderDetail(container: HTMLElement, detail: VideoDetail | null): void {
    container.textContent = "";
    if (detail === null) {
        return;
    }
    container.append(el("h2", "detail-title", detail.title));
    container.append(
        el("p", "detail-meta", `${detail.domain} · ${formatDuration(detail.duration_s)} · ${detail.video_id}`),
    );
    container.append(el("p", "detail-caption", detail.caption ?? "(no caption yet)"));
    if (detail.transcript_preview) {
        container.append(el("h4", undefined, "Transcript"));
        container.append(el("p", "preview", detail.transcript_preview));
    }
    if (detail.ocr_preview) {
        container.append(el("h4", undefined, "On-screen text"));
        container.append(el("p", "preview", detail.ocr_preview));
    }
}

/** Controls that depend on state: alpha slider only in fused mode, submit gating. */
export function renderControls(state: SearchViewState, root: Document | HTMLElement = document): void {
    const alphaWrap = root.querySelector<HTMLElement>("#alpha-wrap");
    if (alphaWrap) {
        alphaWrap.hidden = state.channel !== "fused";
    }
    const submit = root.querySelector<HTMLButtonElement>("#submit-btn");
    if (submit) {
        submit.disabled = state.queryText.trim().length === 0;
    }
    const spinner = root.querySelector<HTMLElement>("#loading");
    if (spinner) {
        spinner.hidden = !state.loading;
    }
}
