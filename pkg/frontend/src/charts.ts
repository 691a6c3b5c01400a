// Hand-rolled SVG renderers: a line chart, horizontal share bars, grouped
// bars, and a tile cartogram. No charting library: the payload values go
// straight onto the screen.

import type { GenderGroup, IndexPoint, LinkEvent } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function svgElement(width: number, height: number): SVGSVGElement {
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("width", "100%");
  return svg;
}

export function formatShare(share: number): string {
  return `${(share * 100).toFixed(1)}%`;
}

export function lineChart(points: IndexPoint[], events: LinkEvent[]): SVGSVGElement {
  const width = 720;
  const height = 280;
  const pad = { left: 48, right: 16, top: 12, bottom: 28 };
  const svg = svgElement(width, height);
  if (points.length === 0) return svg;

  const values = points.map((p) => p.value);
  const vMin = Math.min(...values, 100);
  const vMax = Math.max(...values, 100);
  const spanV = vMax - vMin || 1;
  const x = (i: number) =>
    pad.left + (i / Math.max(points.length - 1, 1)) * (width - pad.left - pad.right);
  const y = (v: number) =>
    height - pad.bottom - ((v - vMin) / spanV) * (height - pad.top - pad.bottom);

  for (const tick of [vMin, (vMin + vMax) / 2, vMax]) {
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(pad.left));
    line.setAttribute("x2", String(width - pad.right));
    line.setAttribute("y1", String(y(tick)));
    line.setAttribute("y2", String(y(tick)));
    line.setAttribute("class", "gridline");
    svg.appendChild(line);
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", "4");
    label.setAttribute("y", String(y(tick) + 4));
    label.setAttribute("class", "axis-label");
    label.textContent = tick.toFixed(0);
    svg.appendChild(label);
  }

  const byDate = new Map(points.map((p, i) => [p.date, i]));
  for (const event of events) {
    const i = byDate.get(event.link_date);
    if (i === undefined) continue;
    const marker = document.createElementNS(SVG_NS, "line");
    marker.setAttribute("x1", String(x(i)));
    marker.setAttribute("x2", String(x(i)));
    marker.setAttribute("y1", String(pad.top));
    marker.setAttribute("y2", String(height - pad.bottom));
    marker.setAttribute("class", "link-marker");
    marker.setAttribute("data-link-date", event.link_date);
    svg.appendChild(marker);
  }

  const path = document.createElementNS(SVG_NS, "polyline");
  path.setAttribute(
    "points",
    points.map((p, i) => `${x(i).toFixed(1)},${y(p.value).toFixed(1)}`).join(" ")
  );
  path.setAttribute("class", "index-line");
  svg.appendChild(path);

  const first = document.createElementNS(SVG_NS, "text");
  first.setAttribute("x", String(pad.left));
  first.setAttribute("y", String(height - 8));
  first.setAttribute("class", "axis-label");
  first.textContent = points[0].date;
  svg.appendChild(first);
  const last = document.createElementNS(SVG_NS, "text");
  last.setAttribute("x", String(width - pad.right - 70));
  last.setAttribute("y", String(height - 8));
  last.setAttribute("class", "axis-label");
  last.textContent = points[points.length - 1].date;
  svg.appendChild(last);
  return svg;
}

export function shareBars(shares: Record<string, number>, topN = 12): HTMLElement {
  const wrap = document.createElement("div");
  wrap.className = "share-bars";
  const entries = Object.entries(shares).slice(0, topN);
  for (const [key, share] of entries) {
    const row = document.createElement("div");
    row.className = "share-row";
    row.dataset.key = key;
    row.dataset.share = String(share);
    const label = document.createElement("span");
    label.className = "share-key";
    label.textContent = key;
    const bar = document.createElement("span");
    bar.className = "share-bar";
    bar.style.width = `${Math.max(share * 100 * 2.4, 1)}px`;
    const value = document.createElement("span");
    value.className = "share-value";
    value.textContent = formatShare(share);
    row.append(label, bar, value);
    wrap.appendChild(row);
  }
  return wrap;
}

export const CATEGORY_COLORS: Record<string, string> = {
  software_dev_tech: "#2563eb",
  creative_multimedia: "#d946ef",
  writing_translation: "#16a34a",
  clerical_data_entry: "#eab308",
  sales_marketing_support: "#f97316",
  professional_services: "#0d9488",
  unclassified: "#9ca3af",
};

export function tileMap(byCountryTop: Record<string, string>): HTMLElement {
  const wrap = document.createElement("div");
  wrap.className = "tile-map";
  const grid = document.createElement("div");
  grid.className = "tile-grid";
  for (const [country, category] of Object.entries(byCountryTop).sort()) {
    const tile = document.createElement("div");
    tile.className = "tile";
    tile.dataset.country = country;
    tile.dataset.category = category;
    tile.style.background = CATEGORY_COLORS[category] ?? "#ddd";
    tile.title = `${country}: ${category}`;
    tile.textContent = country;
    grid.appendChild(tile);
  }
  const legend = document.createElement("div");
  legend.className = "legend";
  for (const [category, color] of Object.entries(CATEGORY_COLORS)) {
    const item = document.createElement("span");
    item.className = "legend-item";
    const dot = document.createElement("span");
    dot.className = "legend-dot";
    dot.style.background = color;
    item.append(dot, document.createTextNode(category));
    legend.appendChild(item);
  }
  wrap.append(grid, legend);
  return wrap;
}

export function genderBars(
  groups: GenderGroup[],
  countryA: string,
  countryB: string
): HTMLElement {
  const wrap = document.createElement("div");
  wrap.className = "gender-bars";
  const occupations = [...new Set(groups.map((g) => g.occupation ?? ""))].sort();
  for (const occupation of occupations) {
    if (!occupation || occupation === "unclassified") continue;
    const row = document.createElement("div");
    row.className = "gender-row";
    const label = document.createElement("span");
    label.className = "gender-occ";
    label.textContent = occupation;
    row.appendChild(label);
    for (const country of [countryA, countryB]) {
      const group = groups.find(
        (g) => g.country === country && g.occupation === occupation
      );
      const cell = document.createElement("span");
      cell.className = "gender-cell";
      cell.dataset.country = country;
      cell.dataset.occupation = occupation;
      if (group && group.share_female !== null) {
        cell.dataset.share = String(group.share_female);
        const bar = document.createElement("span");
        bar.className = "gender-bar";
        bar.style.width = `${group.share_female * 100 * 1.6}px`;
        const text = document.createElement("span");
        text.textContent = `${country} ${formatShare(group.share_female)}`;
        cell.append(bar, text);
      } else {
        cell.textContent = `${country} n/a`;
      }
      row.appendChild(cell);
    }
    wrap.appendChild(row);
  }
  return wrap;
}
