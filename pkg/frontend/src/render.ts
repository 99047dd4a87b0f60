// HTML string rendering of view models.  Kept as pure functions so tests can
// assert on markup without a DOM.

import type { Board, MechanicCard, PaletteEntry, TimelineEntry } from "./viewmodel.js";
import type { JobView } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

export function renderMechanicCards(cards: MechanicCard[]): string {
  const items = cards.map((card) => {
    const pre = card.pre.length
      ? card.pre.map((a) => `<li class="atom">${escapeHtml(a)}</li>`).join("")
      : `<li class="atom empty">(none)</li>`;
    const eff = card.eff.map((a) => `<li class="atom">${escapeHtml(a)}</li>`).join("");
    return `<article class="mechanic-card" data-mechanic="${card.id}">
  <h3>${escapeHtml(card.title)}</h3>
  <h4>preconditions</h4><ul>${pre}</ul>
  <h4>effects</h4><ul>${eff}</ul>
</article>`;
  });
  return items.join("\n");
}

export function renderBoard(board: Board): string {
  if (board.kind === "grid") {
    const byPos = new Map(board.cells.map((c) => [`${c.x},${c.y}`, c.entities]));
    const rows: string[] = [];
    for (let y = board.height - 1; y >= 0; y -= 1) {
      const cells: string[] = [];
      for (let x = 0; x < board.width; x += 1) {
        const entities = byPos.get(`${x},${y}`) ?? [];
        const glyph = entities.map((e) => escapeHtml(e[0] ?? "?")).join("");
        const title = escapeHtml(entities.join(", "));
        cells.push(
          `<td class="cell${entities.length ? " occupied" : ""}" title="${title}" data-x="${x}" data-y="${y}">${glyph}</td>`,
        );
      }
      rows.push(`<tr>${cells.join("")}</tr>`);
    }
    return `<table class="grid-board">${rows.join("")}</table>`;
  }
  const rows = board.rows.map((row) => {
    const bars = row.values
      .map((v) => {
        const width = v.max ? Math.round((100 * v.value) / Math.max(v.max, 1)) : 0;
        const bar = v.max !== null
          ? `<span class="bar"><span class="fill" style="width:${width}%"></span></span>`
          : "";
        return `<div class="stat" data-param="${escapeHtml(v.param)}">${escapeHtml(v.param)}: <b>${v.value}</b>${v.max !== null ? `/${v.max}` : ""} ${bar}</div>`;
      })
      .join("");
    return `<div class="stat-row" data-entity="${escapeHtml(row.entity)}"><h4>${escapeHtml(row.entity)}</h4>${bars}</div>`;
  });
  return `<div class="stat-board">${rows.join("")}</div>`;
}

export function renderPalette(entries: PaletteEntry[]): string {
  const buttons = entries.map((entry) => {
    const inputs = entry.inputs.length
      ? ` <span class="inputs">[${entry.inputs.map(escapeHtml).join(" ")}]</span>`
      : "";
    const disabled = entry.enabled ? "" : " disabled";
    return `<button class="action" data-action="${escapeHtml(String(entry.action))}"${disabled}>${escapeHtml(entry.label)}${inputs}</button>`;
  });
  return `<div class="palette">${buttons.join("")}</div>`;
}

export function renderTimeline(entries: TimelineEntry[]): string {
  const items = entries
    .map(
      (e) =>
        `<li class="step"><span class="tick">t${e.tick}</span> ${escapeHtml(e.agent)}: ${escapeHtml(e.label)}</li>`,
    )
    .join("");
  return `<ol class="timeline">${items}</ol>`;
}

export function renderJobStatus(job: JobView | null): string {
  if (!job) return `<span class="job idle">no job</span>`;
  if (job.status === "done" && job.result) {
    return `<span class="job done">done: ${escapeHtml(job.result.status)} after ${job.result.candidates_tested} candidates</span>`;
  }
  if (job.status === "failed") {
    return `<span class="job failed">failed: ${escapeHtml(job.error ?? "unknown")}</span>`;
  }
  return `<span class="job running">${escapeHtml(job.status)}…</span>`;
}

export function renderFlash(flash: string | null): string {
  return flash ? `<div class="flash" role="alert">${escapeHtml(flash)}</div>` : "";
}
