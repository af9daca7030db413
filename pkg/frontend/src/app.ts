// Page wiring: canvas floor plan + control panels around the ViewState.
// All drawing derives from the latest scene; gestures go out through
// state.dispatch and nothing is rendered optimistically.

import { GatewayClient } from "./client.js";
import { ViewState } from "./store.js";
import { WEATHER_KINDS, WeatherKind } from "./protocol.js";
import { ApplianceBadge, Scene } from "./viewmodel.js";

const WEATHER_GLYPHS: Record<string, string> = {
  rain: "\u{1F327}",
  snow: "\u{1F328}",
  hot: "\u{2600}",
  cloudy: "\u{2601}",
};

const APPLIANCE_GLYPHS: Record<string, string> = {
  light: "\u{1F4A1}",
  air_conditioner: "\u{2744}",
  tv: "\u{1F4FA}",
  fan: "\u{1F300}",
  curtain: "\u{1FA9F}",
  gate: "\u{1F6AA}",
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

class FloorPlan {
  private ctx: CanvasRenderingContext2D;
  private scale = 1;
  private ox = 0;
  private oy = 0;
  private dragging: string | null = null;

  constructor(
    private canvas: HTMLCanvasElement,
    private state: ViewState,
    private redraw: () => void,
  ) {
    this.ctx = canvas.getContext("2d")!;
    canvas.addEventListener("mousedown", (e) => this.onDown(e));
    canvas.addEventListener("mousemove", (e) => this.onMove(e));
    canvas.addEventListener("mouseup", (e) => this.onUp(e));
    canvas.addEventListener("mouseleave", () => (this.dragging = null));
  }

  private toCanvas(x: number, y: number): [number, number] {
    return [this.ox + x * this.scale, this.oy + y * this.scale];
  }

  private toHome(px: number, py: number): [number, number] {
    return [(px - this.ox) / this.scale, (py - this.oy) / this.scale];
  }

  private mouse(e: MouseEvent): [number, number] {
    const rect = this.canvas.getBoundingClientRect();
    return [e.clientX - rect.left, e.clientY - rect.top];
  }

  private onDown(e: MouseEvent): void {
    const scene = this.state.scene;
    if (!scene) return;
    const [mx, my] = this.mouse(e);
    for (const m of scene.markers) {
      const [cx, cy] = this.toCanvas(m.x, m.y);
      if ((mx - cx) ** 2 + (my - cy) ** 2 <= 14 ** 2) {
        this.dragging = m.id;
        return;
      }
    }
  }

  private onMove(e: MouseEvent): void {
    if (this.dragging) {
      const [hx, hy] = this.toHome(...this.mouse(e));
      this.draw(this.state.scene, [hx, hy]);
    }
  }

  private onUp(e: MouseEvent): void {
    if (!this.dragging) return;
    const [hx, hy] = this.toHome(...this.mouse(e));
    this.state.dispatch({ kind: "drag_person", person: this.dragging, x: hx, y: hy });
    this.dragging = null;
    this.redraw();
  }

  draw(scene: Scene | null, ghost: [number, number] | null = null): void {
    const ctx = this.ctx;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    if (!scene) return;

    let maxX = 1;
    let maxY = 1;
    for (const r of scene.rooms) {
      maxX = Math.max(maxX, r.bounds[2]);
      maxY = Math.max(maxY, r.bounds[3]);
    }
    const pad = 24;
    this.scale = Math.min(
      (this.canvas.width - 2 * pad) / maxX,
      (this.canvas.height - 2 * pad) / maxY,
    );
    this.ox = pad;
    this.oy = pad;

    for (const room of scene.rooms) {
      const [x0, y0] = this.toCanvas(room.bounds[0], room.bounds[1]);
      const w = (room.bounds[2] - room.bounds[0]) * this.scale;
      const h = (room.bounds[3] - room.bounds[1]) * this.scale;
      ctx.fillStyle = room.outside ? "#dcedc8" : room.dark ? "#37474f" : "#fffde7";
      ctx.fillRect(x0, y0, w, h);
      ctx.strokeStyle = "#455a64";
      ctx.lineWidth = 2;
      ctx.strokeRect(x0, y0, w, h);
      ctx.fillStyle = room.dark ? "#eceff1" : "#37474f";
      ctx.font = "12px sans-serif";
      ctx.fillText(room.name, x0 + 6, y0 + 16);
      if (room.temperature !== null) {
        ctx.font = "11px sans-serif";
        ctx.fillText(
          `${room.temperature.toFixed(1)}°C  ${Math.round(room.illumination ?? 0)} lx`,
          x0 + 6,
          y0 + 30,
        );
      }
    }

    ctx.font = "14px sans-serif";
    for (const item of scene.furniture) {
      const [cx, cy] = this.toCanvas(item.x, item.y);
      ctx.fillStyle = "#8d6e63";
      ctx.fillText(`\u{1F6CB} ${item.id}`, cx - 10, cy + 4);
    }
    for (const badge of scene.badges) {
      const [cx, cy] = this.toCanvas(badge.x, badge.y);
      ctx.fillStyle = badge.on ? "#f9a825" : "#90a4ae";
      ctx.fillText(APPLIANCE_GLYPHS[badge.applianceKind] ?? "⚙", cx - 7, cy + 5);
      ctx.font = "10px sans-serif";
      ctx.fillText(`${badge.id} ${badge.label}`, cx - 16, cy + 18);
      ctx.font = "14px sans-serif";
    }
    for (const m of scene.markers) {
      const [cx, cy] = this.toCanvas(m.x, m.y);
      ctx.beginPath();
      ctx.arc(cx, cy, 9, 0, Math.PI * 2);
      ctx.fillStyle = m.authenticated ? "#2e7d32" : "#c62828";
      ctx.fill();
      ctx.fillStyle = "#263238";
      ctx.font = "11px sans-serif";
      ctx.fillText(m.id, cx + 12, cy + 4);
    }
    if (ghost && this.dragging) {
      const [cx, cy] = this.toCanvas(ghost[0], ghost[1]);
      ctx.beginPath();
      ctx.arc(cx, cy, 9, 0, Math.PI * 2);
      ctx.strokeStyle = "#2e7d32";
      ctx.setLineDash([3, 3]);
      ctx.stroke();
      ctx.setLineDash([]);
    }
  }
}

class AppliancePanel {
  private cards = new Map<string, HTMLElement>();

  constructor(private root: HTMLElement, private state: ViewState) {}

  update(scene: Scene): void {
    const seen = new Set<string>();
    for (const badge of scene.badges) {
      seen.add(badge.id);
      let card = this.cards.get(badge.id);
      if (!card) {
        card = this.build(badge);
        this.cards.set(badge.id, card);
        this.root.appendChild(card);
      }
      card.querySelector<HTMLElement>(".badge-label")!.textContent = badge.label;
      card.querySelector<HTMLElement>(".badge-label")!.className =
        "badge-label " + (badge.on ? "on" : "off");
      const toggle = card.querySelector<HTMLButtonElement>(".toggle")!;
      toggle.textContent =
        badge.applianceKind === "gate" ? (badge.on ? "close" : "open") : badge.on ? "turn off" : "turn on";
    }
    for (const [id, card] of this.cards) {
      if (!seen.has(id)) {
        card.remove();
        this.cards.delete(id);
      }
    }
  }

  private build(badge: ApplianceBadge): HTMLElement {
    const card = document.createElement("div");
    card.className = "card";
    const glyph = APPLIANCE_GLYPHS[badge.applianceKind] ?? "⚙";
    card.innerHTML = `<span class="card-title">${glyph} ${badge.id}</span>
      <span class="badge-label off">OFF</span>
      <button class="toggle"></button>`;
    const toggle = card.querySelector<HTMLButtonElement>(".toggle")!;
    toggle.onclick = () => {
      const current = this.state.scene?.badges.find((b) => b.id === badge.id);
      if (!current) return;
      const property = badge.applianceKind === "gate" ? "open" : "power";
      this.state.dispatch({
        kind: "override",
        appliance: badge.id,
        property,
        value: !current.on,
      });
    };
    if (badge.applianceKind === "tv") {
      const input = document.createElement("input");
      input.type = "number";
      input.min = "1";
      input.placeholder = "ch";
      const set = document.createElement("button");
      set.textContent = "set channel";
      set.onclick = () => {
        const channel = parseInt(input.value, 10);
        if (channel >= 1) {
          this.state.dispatch({
            kind: "override", appliance: badge.id, property: "channel", value: channel,
          });
        }
      };
      card.append(input, set);
    }
    if (badge.applianceKind === "air_conditioner") {
      const input = document.createElement("input");
      input.type = "number";
      input.placeholder = "°C";
      const set = document.createElement("button");
      set.textContent = "set cool";
      set.onclick = () => {
        const setpoint = parseFloat(input.value);
        if (!Number.isNaN(setpoint)) {
          this.state.dispatch({ kind: "override", appliance: badge.id, property: "mode", value: "cool" });
          this.state.dispatch({ kind: "override", appliance: badge.id, property: "setpoint", value: setpoint });
        }
      };
      card.append(input, set);
    }
    return card;
  }
}

function main(): void {
  const state = new ViewState();
  const canvas = el<HTMLCanvasElement>("floorplan");
  const statusEl = el<HTMLSpanElement>("status");
  const tickEl = el<HTMLSpanElement>("tick");
  const weatherEl = el<HTMLSpanElement>("weather-now");
  const bannerEl = el<HTMLDivElement>("banner");
  const logEl = el<HTMLDivElement>("log");
  const appliancesEl = el<HTMLDivElement>("appliances");

  let plan: FloorPlan;
  const panel = new AppliancePanel(appliancesEl, state);

  const redraw = () => {
    statusEl.textContent = state.status;
    statusEl.className = state.status;
    bannerEl.textContent = state.banner ?? "";
    bannerEl.style.display = state.banner ? "block" : "none";
    const scene = state.scene;
    if (scene) {
      tickEl.textContent = `tick ${scene.tick}`;
      weatherEl.textContent = `${WEATHER_GLYPHS[scene.weather] ?? ""} ${scene.weather}`;
      panel.update(scene);
    }
    plan.draw(scene);
    logEl.textContent = state.log
      .slice(-14)
      .map((entry) => `[${entry.tick}] ${entry.text}`)
      .join("\n");
    logEl.scrollTop = logEl.scrollHeight;
  };

  plan = new FloorPlan(canvas, state, redraw);

  const weatherBar = el<HTMLDivElement>("weather-buttons");
  for (const kind of WEATHER_KINDS) {
    const button = document.createElement("button");
    button.textContent = `${WEATHER_GLYPHS[kind]} ${kind}`;
    button.onclick = () => state.dispatch({ kind: "weather", weather: kind as WeatherKind });
    weatherBar.appendChild(button);
  }

  el<HTMLButtonElement>("btn-pause").onclick = () => state.dispatch({ kind: "pause" });
  el<HTMLButtonElement>("btn-resume").onclick = () => state.dispatch({ kind: "resume" });
  el<HTMLButtonElement>("btn-step").onclick = () => state.dispatch({ kind: "step", n: 1 });
  el<HTMLInputElement>("speed").onchange = (e) => {
    const tps = parseFloat((e.target as HTMLInputElement).value);
    if (tps > 0) state.dispatch({ kind: "speed", tps });
  };
  el<HTMLButtonElement>("btn-auth").onclick = () => {
    const person = el<HTMLInputElement>("auth-person").value.trim();
    const credential = el<HTMLInputElement>("auth-credential").value;
    if (person) state.dispatch({ kind: "authenticate", person, credential });
  };

  const url = `ws://${location.hostname}:${new URLSearchParams(location.search).get("port") ?? "8765"}`;
  new GatewayClient(url, state, redraw).connect();
  redraw();
}

main();
