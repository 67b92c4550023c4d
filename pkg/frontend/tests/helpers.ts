/** Minimal fetch built on node:http, so tests do not depend on whichever
 * global fetch the test environment installs. */

import http from "node:http";

export interface MiniResponse {
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
  text(): Promise<string>;
}

export function miniFetch(url: string, init?: { method?: string; headers?: Record<string, string>; body?: string }): Promise<MiniResponse> {
  return new Promise((resolve, reject) => {
    const request = http.request(
      url,
      { method: init?.method ?? "GET", headers: init?.headers ?? {} },
      (response) => {
        const chunks: Buffer[] = [];
        response.on("data", (chunk) => chunks.push(chunk));
        response.on("end", () => {
          const body = Buffer.concat(chunks).toString("utf-8");
          const status = response.statusCode ?? 0;
          resolve({
            ok: status >= 200 && status < 300,
            status,
            json: async () => JSON.parse(body),
            text: async () => body,
          });
        });
      },
    );
    request.on("error", reject);
    if (init?.body) request.write(init.body);
    request.end();
  });
}

export async function waitForServer(base: string, attempts = 60): Promise<void> {
  for (let i = 0; i < attempts; i++) {
    try {
      const response = await miniFetch(`${base}/api/progress`);
      if (response.status > 0) return;
    } catch {
      // not ready yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error(`service at ${base} never came up`);
}
