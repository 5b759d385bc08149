// Fixture loader for captured API responses. The JSON files under
// fixtures/ are verbatim bodies recorded from a live service run, so the
// tests assert against real payloads rather than hand-typed approximations.

import { readFileSync } from "node:fs";

export function loadFixture<T>(name: string): T {
  const url = new URL(`./fixtures/${name}`, import.meta.url);
  return JSON.parse(readFileSync(url, "utf8")) as T;
}
