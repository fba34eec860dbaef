/** Test helpers: fixtures captured from the real service, and fetch fakes. */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const FIXTURE_DIR = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export interface Fixture {
    status: number;
    body: unknown;
}

export function fixture(name: string): Fixture {
    return JSON.parse(readFileSync(join(FIXTURE_DIR, name), "utf-8")) as Fixture;
}

export function fixtureResponse(name: string): Response {
    const { status, body } = fixture(name);
    return new Response(JSON.stringify(body), {
        status,
        headers: { "Content-Type": "application/json" },
    });
}

export interface PendingRequest {
    url: string;
    resolve: (response: Response) => void;
    reject: (error: unknown) => void;
}

/**
 * A fetch stand-in whose promises are resolved manually by the test,
 * so responses can be delivered out of order.
 */
export function deferredFetch(options: { honorAbort?: boolean } = {}) {
    const pending: PendingRequest[] = [];
    const requestedUrls: string[] = [];
    const fetchFn = (url: string, init?: RequestInit): Promise<Response> => {
        requestedUrls.push(url);
        return new Promise<Response>((resolve, reject) => {
            if (options.honorAbort) {
                init?.signal?.addEventListener("abort", () =>
                    reject(new DOMException("The operation was aborted.", "AbortError")),
                );
            }
            pending.push({ url, resolve, reject });
        });
    };
    return { fetchFn, pending, requestedUrls };
}

/** A fetch stand-in that answers immediately from a url-matcher. */
export function routedFetch(route: (url: string) => Response) {
    const requestedUrls: string[] = [];
    const fetchFn = (url: string): Promise<Response> => {
        requestedUrls.push(url);
        return Promise.resolve(route(url));
    };
    return { fetchFn, requestedUrls };
}

export async function flushMicrotasks(): Promise<void> {
    await new Promise((resolve) => setTimeout(resolve, 0));
}
