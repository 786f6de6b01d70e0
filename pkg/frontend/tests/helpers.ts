import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const here = dirname(fileURLToPath(import.meta.url));

export function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(here, "fixtures", name), "utf-8")) as T;
}

export function el(): HTMLElement {
  const root = document.createElement("div");
  document.body.appendChild(root);
  return root;
}

/** All rendered numbers in a subtree: the exact payload values they carry. */
export function rawValues(root: HTMLElement): number[] {
  return Array.from(root.querySelectorAll("[data-raw]")).map((node) =>
    Number((node as HTMLElement).dataset.raw),
  );
}

type Route = (init?: RequestInit) => { status: number; body: unknown };

/** fetch stand-in serving canned payloads and recording every request. */
export function fakeFetch(routes: Record<string, Route>) {
  const calls: { url: string; method: string; body: unknown }[] = [];
  const impl = async (url: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? "GET";
    calls.push({
      url,
      method,
      body: init?.body ? JSON.parse(init.body as string) : null,
    });
    const key = `${method} ${url}`;
    const route = routes[key] ?? routes[`* ${url}`];
    if (!route) {
      throw new Error(`no route for ${key}`);
    }
    const { status, body } = route(init);
    return new Response(JSON.stringify(body), {
      status,
      headers: { "content-type": "application/json" },
    });
  };
  return { impl, calls };
}
