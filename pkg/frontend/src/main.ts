// Browser bootstrap: wires the controller to the static page in index.html.

import { ApiClient } from "./api.js";
import { PlaygroundController } from "./controller.js";
import {
  renderBoard,
  renderFlash,
  renderJobStatus,
  renderMechanicCards,
  renderPalette,
  renderTimeline,
} from "./render.js";
import {
  banner,
  buildBoard,
  buildDomainSummary,
  buildMechanicCards,
  buildPalette,
  buildTimeline,
} from "./viewmodel.js";

const baseUrl =
  new URLSearchParams(window.location.search).get("service") ?? "http://127.0.0.1:8000";
const controller = new PlaygroundController(new ApiClient(baseUrl));

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function redraw(): void {
  const { domain, job, mechanics, session, flash } = controller.state;
  el("flash").innerHTML = renderFlash(flash);
  el("job-status").innerHTML = renderJobStatus(job);
  if (domain) {
    const summary = buildDomainSummary(domain);
    el("domain-summary").innerHTML =
      `<b>${summary.entities.length}</b> entities, ` +
      `<b>${summary.parameters.length}</b> parameters, ` +
      `agents: ${summary.agents.join(", ")} — ` +
      `${summary.spatial ? "grid view" : "stat view"}`;
  }
  el("mechanic-cards").innerHTML = renderMechanicCards(buildMechanicCards(mechanics));
  if (session) {
    const player = domain?.agents?.[0] ?? session.turn_agent;
    el("board").innerHTML = renderBoard(buildBoard(session, domain ?? undefined));
    el("palette").innerHTML = renderPalette(buildPalette(session, player));
    el("timeline").innerHTML = renderTimeline(buildTimeline(session));
    el("turn").textContent = `tick ${session.tick}, ${session.turn_agent} to act`;
    const note = banner(session);
    el("banner").textContent = note ?? "";
    el("banner").className = note ? `banner ${session.status}` : "banner";
    for (const button of el("palette").querySelectorAll<HTMLButtonElement>("button.action")) {
      button.addEventListener("click", () => {
        const raw = button.dataset.action ?? "noop";
        const action = /^\d+$/.test(raw) ? Number(raw) : raw;
        void controller.act(player, action).then(redraw);
      });
    }
  }
}

async function main(): Promise<void> {
  el<HTMLButtonElement>("upload").addEventListener("click", async () => {
    const text = el<HTMLTextAreaElement>("domain-input").value;
    try {
      await controller.uploadDomain(JSON.parse(text));
    } catch (error) {
      controller.state.flash = String(error);
    }
    redraw();
  });

  el<HTMLButtonElement>("generate").addEventListener("click", async () => {
    try {
      await controller.startGeneration();
      redraw();
      await controller.waitForJob();
    } catch (error) {
      controller.state.flash = String(error);
    }
    redraw();
  });

  el<HTMLButtonElement>("open-session").addEventListener("click", async () => {
    try {
      await controller.openSession();
    } catch (error) {
      controller.state.flash = String(error);
    }
    redraw();
  });

  el<HTMLButtonElement>("reset-session").addEventListener("click", async () => {
    try {
      await controller.reset();
    } catch (error) {
      controller.state.flash = String(error);
    }
    redraw();
  });

  el<HTMLButtonElement>("adapt").addEventListener("click", async () => {
    try {
      const overlay = JSON.parse(el<HTMLTextAreaElement>("overlay-input").value || "{}");
      await controller.startAdaptation(controller.state.mechanics, overlay);
      redraw();
      await controller.waitForJob();
    } catch (error) {
      controller.state.flash = String(error);
    }
    redraw();
  });
}

void main();
