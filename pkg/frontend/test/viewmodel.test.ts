// Rendering the fixture's snapshots must reproduce the before/after state
// semantics: inhabitant outside with everything off, then light + cooling
// on entry, TV at the favorite channel on the sofa, all off after leaving.

import { describe, expect, it } from "vitest";

import { SchemaError, render, validateSnapshot } from "../src/viewmodel.js";
import { loadFixture } from "./fixture.js";

const fixture = loadFixture();

function scene(name: keyof typeof fixture.snapshots) {
  return render(validateSnapshot(fixture.snapshots[name]));
}

function badge(s: ReturnType<typeof scene>, id: string) {
  const found = s.badges.find((b) => b.id === id);
  expect(found).toBeDefined();
  return found!;
}

describe("initial snapshot (nobody home)", () => {
  const s = scene("initial");

  it("shows the inhabitant outside and unauthenticated", () => {
    const lee = s.markers.find((m) => m.id === "lee")!;
    expect(lee.space).toBe("outside");
    expect(lee.authenticated).toBe(false);
  });

  it("shows every appliance off and the gate closed", () => {
    expect(badge(s, "tv").label).toBe("OFF");
    expect(badge(s, "light_living").label).toBe("OFF");
    expect(badge(s, "ac").label).toBe("OFF");
    expect(badge(s, "gate").label).toBe("CLOSED");
    expect(s.badges.every((b) => !b.on)).toBe(true);
  });

  it("draws rooms from snapshot bounds with indoor readouts", () => {
    const living = s.rooms.find((r) => r.id === "living_room")!;
    expect(living.bounds).toEqual([2, 0, 6, 4]);
    expect(living.temperature).toBe(29.0);
    expect(living.dark).toBe(false); // no facts derived before the first tick
    const outside = s.rooms.find((r) => r.id === "outside")!;
    expect(outside.outside).toBe(true);
    expect(outside.temperature).toBeNull();
  });
});

describe("after entry", () => {
  const s = scene("after_entry");

  it("marks the inhabitant present in the living room", () => {
    const lee = s.markers.find((m) => m.id === "lee")!;
    expect(lee.space).toBe("living_room");
    expect(lee.authenticated).toBe(true);
  });

  it("shows the light on and the AC cooling toward its setpoint", () => {
    expect(badge(s, "light_living").label).toBe("ON");
    expect(badge(s, "ac").label).toBe("ON·cool 25°");
    expect(badge(s, "gate").label).toBe("OPEN");
  });
});

describe("after sitting on the sofa", () => {
  const s = scene("after_sofa");

  it("shows the TV on at the favorite channel", () => {
    expect(badge(s, "tv").label).toBe("ON·9");
    expect(badge(s, "tv").on).toBe(true);
  });

  it("reflects the sitting activity on the marker", () => {
    expect(s.markers.find((m) => m.id === "lee")!.activity).toBe("sitting-on:sofa");
  });
});

describe("after departure", () => {
  const s = scene("after_depart");

  it("shows everything powered off again, channel memory retained", () => {
    expect(badge(s, "tv").label).toBe("OFF");
    expect(badge(s, "tv").channel).toBe(9);
    expect(badge(s, "light_living").on).toBe(false);
    expect(badge(s, "ac").on).toBe(false);
    expect(s.markers.find((m) => m.id === "lee")!.space).toBe("outside");
  });

  it("marks the unlit living room dark again", () => {
    expect(s.rooms.find((r) => r.id === "living_room")!.dark).toBe(true);
  });
});

describe("render is a pure view function", () => {
  it("identical snapshots produce identical scenes", () => {
    const a = scene("after_sofa");
    const b = scene("after_sofa");
    expect(a).toEqual(b);
  });

  it("facts become readable log lines", () => {
    const s = scene("after_sofa");
    expect(s.facts).toContain("lee sitting-on sofa");
    expect(s.facts).toContain("lee present home");
  });
});

describe("schema validation", () => {
  it("rejects snapshots missing sections", () => {
    expect(() => validateSnapshot({ tick: 1, weather: "hot" })).toThrow(SchemaError);
    expect(() => validateSnapshot(null)).toThrow(SchemaError);
    expect(() =>
      validateSnapshot({ tick: 1, weather: "hot", spaces: [{ id: "x", bounds: [1, 2] }], factors: [], facts: [] }),
    ).toThrow(SchemaError);
  });
});
