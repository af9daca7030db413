// Loader for the session fixture recorded from the real gateway
// (see scripts/record_fixture.py).

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { Gesture } from "../src/gestures.js";

export interface FixtureGesture {
  gesture: Gesture;
  expected: Record<string, unknown>;
}

export interface Fixture {
  scenario: string;
  snapshots: Record<"initial" | "after_entry" | "after_sofa" | "after_depart", unknown>;
  gestures: FixtureGesture[];
}

const here = dirname(fileURLToPath(import.meta.url));

export function loadFixture(): Fixture {
  return JSON.parse(readFileSync(join(here, "fixtures", "session.json"), "utf-8"));
}
