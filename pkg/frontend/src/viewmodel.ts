// Pure view model: a server snapshot becomes the scene the canvas and the
// control panels draw. The UI never computes simulation state locally; with
// the server as the single source of truth, rendering the same snapshot
// twice yields the same scene.

export type Rect = [number, number, number, number];

export interface SnapshotConditions {
  temperature: number;
  humidity: number;
  illumination: number;
}

export interface SnapshotSpace {
  id: string;
  name: string;
  parent: string | null;
  bounds: Rect;
  window_factor: number;
  conditions?: SnapshotConditions;
}

export interface SnapshotFactor {
  id: string;
  kind: string;
  space: string;
  position: [number, number];
  appliance_kind?: string;
  power?: boolean;
  open?: boolean;
  mode?: string | null;
  setpoint?: number | null;
  channel?: number | null;
  lamp_lux?: number;
  authenticated?: boolean;
  activity?: string | null;
  preferences?: Record<string, unknown>;
}

export type FactTriple = [string, string, string | boolean];

export interface Snapshot {
  tick: number;
  weather: string;
  spaces: SnapshotSpace[];
  factors: SnapshotFactor[];
  facts: FactTriple[];
}

export class SchemaError extends Error {}

function fail(msg: string): never {
  throw new SchemaError(msg);
}

export function validateSnapshot(doc: unknown): Snapshot {
  if (typeof doc !== "object" || doc === null) fail("snapshot must be an object");
  const rec = doc as Record<string, unknown>;
  if (typeof rec["tick"] !== "number") fail("snapshot.tick must be a number");
  if (typeof rec["weather"] !== "string") fail("snapshot.weather must be a string");
  for (const key of ["spaces", "factors", "facts"]) {
    if (!Array.isArray(rec[key])) fail(`snapshot.${key} must be an array`);
  }
  for (const s of rec["spaces"] as unknown[]) {
    const row = s as Record<string, unknown>;
    if (typeof row["id"] !== "string") fail("space id must be a string");
    const bounds = row["bounds"];
    if (!Array.isArray(bounds) || bounds.length !== 4 || bounds.some((v) => typeof v !== "number")) {
      fail(`space ${row["id"]} bounds must be [x0, y0, x1, y1]`);
    }
  }
  for (const f of rec["factors"] as unknown[]) {
    const row = f as Record<string, unknown>;
    if (typeof row["id"] !== "string") fail("factor id must be a string");
    const pos = row["position"];
    if (!Array.isArray(pos) || pos.length !== 2 || pos.some((v) => typeof v !== "number")) {
      fail(`factor ${row["id"]} position must be [x, y]`);
    }
  }
  return rec as unknown as Snapshot;
}

// ---------------------------------------------------------------------------

export interface RoomView {
  id: string;
  name: string;
  bounds: Rect;
  interior: boolean;
  outside: boolean;
  dark: boolean;
  temperature: number | null;
  humidity: number | null;
  illumination: number | null;
}

export interface PersonMarker {
  id: string;
  space: string;
  x: number;
  y: number;
  authenticated: boolean;
  activity: string | null;
}

export interface ApplianceBadge {
  id: string;
  applianceKind: string;
  space: string;
  x: number;
  y: number;
  on: boolean;
  label: string;
  mode: string | null;
  setpoint: number | null;
  channel: number | null;
}

export interface FurnitureMark {
  id: string;
  space: string;
  x: number;
  y: number;
}

export interface Scene {
  tick: number;
  weather: string;
  rooms: RoomView[];
  markers: PersonMarker[];
  badges: ApplianceBadge[];
  furniture: FurnitureMark[];
  facts: string[];
}

export function badgeLabel(f: SnapshotFactor): string {
  const kind = f.appliance_kind ?? "";
  if (kind === "gate") return f.open ? "OPEN" : "CLOSED";
  if (!f.power) return "OFF";
  if (kind === "tv") return f.channel != null ? `ON·${f.channel}` : "ON";
  if (kind === "air_conditioner" && f.mode) {
    return f.setpoint != null ? `ON·${f.mode} ${f.setpoint}°` : `ON·${f.mode}`;
  }
  return "ON";
}

function rootId(spaces: SnapshotSpace[]): string | null {
  for (const s of spaces) if (s.parent == null) return s.id;
  return null;
}

export function render(snapshot: Snapshot): Scene {
  const root = rootId(snapshot.spaces);
  const darkSpaces = new Set(
    snapshot.facts
      .filter(([, pred, obj]) => pred === "dark" && obj === true)
      .map(([subject]) => subject),
  );
  const rooms: RoomView[] = snapshot.spaces
    .filter((s) => s.id !== root)
    .map((s) => ({
      id: s.id,
      name: s.name,
      bounds: s.bounds,
      interior: s.conditions !== undefined,
      outside: s.conditions === undefined,
      dark: darkSpaces.has(s.id),
      temperature: s.conditions?.temperature ?? null,
      humidity: s.conditions?.humidity ?? null,
      illumination: s.conditions?.illumination ?? null,
    }));

  const markers: PersonMarker[] = [];
  const badges: ApplianceBadge[] = [];
  const furniture: FurnitureMark[] = [];
  for (const f of snapshot.factors) {
    const [x, y] = f.position;
    if (f.kind === "person") {
      markers.push({
        id: f.id,
        space: f.space,
        x,
        y,
        authenticated: f.authenticated ?? false,
        activity: f.activity ?? null,
      });
    } else if (f.kind === "appliance") {
      badges.push({
        id: f.id,
        applianceKind: f.appliance_kind ?? "",
        space: f.space,
        x,
        y,
        on: f.appliance_kind === "gate" ? (f.open ?? false) : (f.power ?? false),
        label: badgeLabel(f),
        mode: f.mode ?? null,
        setpoint: f.setpoint ?? null,
        channel: f.channel ?? null,
      });
    } else if (f.kind === "furniture") {
      furniture.push({ id: f.id, space: f.space, x, y });
    }
  }

  return {
    tick: snapshot.tick,
    weather: snapshot.weather,
    rooms,
    markers,
    badges,
    furniture,
    facts: snapshot.facts.map(([s, p, o]) => `${s} ${p} ${String(o)}`),
  };
}
