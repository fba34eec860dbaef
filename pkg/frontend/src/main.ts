/** Entry point: wires the store to the DOM against a configurable base URL. */

import { ChannelMode, SearchApi } from "./api.js";
import { SearchStore } from "./state.js";
import { renderControls, renderDetail, renderError, renderResults } from "./view.js";

const BASE_URL =
    (window as { LVSEARCH_BASE_URL?: string }).LVSEARCH_BASE_URL ?? "http://127.0.0.1:8000";

function byId<T extends HTMLElement>(id: string): T {
    const node = document.getElementById(id);
    if (!node) {
        throw new Error(`missing element #${id}`);
    }
    return node as T;
}

export function boot(): SearchStore {
    const api = new SearchApi(BASE_URL);
    const store = new SearchStore(api);

    const form = byId<HTMLFormElement>("search-form");
    const input = byId<HTMLInputElement>("query-input");
    const channelSelect = byId<HTMLSelectElement>("channel-select");
    const alphaSlider = byId<HTMLInputElement>("alpha-slider");
    const languageSelect = byId<HTMLSelectElement>("language-select");
    const resultsPane = byId<HTMLElement>("results");
    const errorBanner = byId<HTMLElement>("error-banner");
    const detailPane = byId<HTMLElement>("detail");
    const healthLine = byId<HTMLElement>("health-line");

    const showDetail = (videoId: string) => {
        api.video(videoId)
            .then((detail) => renderDetail(detailPane, detail))
            .catch((err) => renderError(errorBanner, `Could not load video: ${err.message}`));
    };

    store.subscribe((state) => {
        renderControls(state);
        renderError(errorBanner, state.error);
        renderResults(resultsPane, state.lastResponse, showDetail);
    });

    form.addEventListener("submit", (event) => {
        event.preventDefault();
        void store.submit();
    });
    input.addEventListener("input", () => store.setQuery(input.value));
    channelSelect.addEventListener("change", () => {
        void store.toggleChannel(channelSelect.value as ChannelMode);
    });
    alphaSlider.addEventListener("change", () => {
        void store.setAlpha(Number(alphaSlider.value));
    });
    languageSelect.addEventListener("change", () => store.selectLanguage(languageSelect.value));
    errorBanner.addEventListener("click", (event) => {
        if ((event.target as HTMLElement).classList.contains("error-dismiss")) {
            store.dismissError();
        }
    });

    api.health()
        .then((health) => {
            healthLine.textContent =
                `serving ${health.n_videos} videos · index ${health.index_fingerprint.slice(0, 12)}`;
        })
        .catch(() => {
            healthLine.textContent = "service unreachable";
        });

    renderControls(store.state);
    return store;
}

if (typeof document !== "undefined" && document.getElementById("search-form")) {
    boot();
}
