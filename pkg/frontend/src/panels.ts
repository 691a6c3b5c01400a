// Panel controllers: state in, one API query out, rendered DOM in place.
// Each refresh is traceable to exactly one request URL; failures show a
// banner with retry and never leave stale numbers posing as fresh.

import { PanelClient, downloadUrl, panelUrl } from "./api.js";
import { genderBars, lineChart, shareBars, tileMap } from "./charts.js";
import type { ViewState } from "./state.js";
import type {
  DemandResponse,
  GenderResponse,
  IndexResponse,
  SupplyResponse,
} from "./types.js";

export interface PanelHost {
  root: HTMLElement;
  onSnapshot?: (snapshotId: number) => void;
}

function clear(element: HTMLElement): void {
  while (element.firstChild) element.removeChild(element.firstChild);
}

function noData(): HTMLElement {
  const div = document.createElement("div");
  div.className = "no-data";
  div.textContent = "no data for this filter combination";
  return div;
}

export class Panel<T> {
  readonly client: PanelClient;
  lastUrl: string | null = null;
  private requestSeq = 0;

  constructor(
    readonly name: "index" | "supply" | "occupations" | "gender",
    readonly host: PanelHost,
    private readonly render: (payload: T, state: ViewState, into: HTMLElement) => void,
    client?: PanelClient
  ) {
    this.client = client ?? new PanelClient();
  }

  async refresh(state: ViewState): Promise<void> {
    const url = panelUrl(this.name, state);
    this.lastUrl = url;
    const seq = ++this.requestSeq;
    try {
      const payload = await this.client.fetchJson<T>(this.name, url);
      if (seq !== this.requestSeq) return; // a newer refresh superseded this one
      const snapshotId = (payload as any).snapshot_id;
      if (typeof snapshotId === "number") this.host.onSnapshot?.(snapshotId);
      clear(this.host.root);
      this.render(payload, state, this.host.root);
    } catch (error) {
      if ((error as Error).name === "AbortError") return;
      if (seq !== this.requestSeq) return;
      clear(this.host.root);
      this.showError(state, String(error));
    }
  }

  private showError(state: ViewState, message: string): void {
    const banner = document.createElement("div");
    banner.className = "error-banner";
    const text = document.createElement("span");
    text.textContent = `failed to load: ${message}`;
    const retry = document.createElement("button");
    retry.className = "retry";
    retry.textContent = "retry";
    retry.addEventListener("click", () => void this.refresh(state));
    banner.append(text, retry);
    this.host.root.appendChild(banner);
  }
}

export function renderIndex(payload: IndexResponse, _state: ViewState, into: HTMLElement): void {
  if (payload.points.length === 0) {
    into.appendChild(noData());
    return;
  }
  const latest = payload.points[payload.points.length - 1];
  const headline = document.createElement("div");
  headline.className = "headline";
  headline.dataset.value = String(latest.value);
  headline.textContent = `index ${latest.value.toFixed(1)} on ${latest.date} (base ${payload.base_date} = 100)`;
  into.appendChild(headline);
  into.appendChild(lineChart(payload.points, payload.link_events));
}

export function renderSupply(payload: SupplyResponse, _state: ViewState, into: HTMLElement): void {
  if (payload.denominator === 0) {
    into.appendChild(noData());
    return;
  }
  const caption = document.createElement("div");
  caption.className = "caption";
  caption.textContent = `distinct workers in the ${payload.window_days}-day window ending ${payload.as_of}: ${payload.denominator.toLocaleString()}`;
  into.appendChild(caption);
  into.appendChild(shareBars(payload.shares));
}

export function renderOccupations(
  payload: DemandResponse,
  _state: ViewState,
  into: HTMLElement
): void {
  if (payload.denominator === 0) {
    into.appendChild(noData());
    return;
  }
  const caption = document.createElement("div");
  caption.className = "caption";
  caption.textContent =
    `top category: ${payload.top_category ?? "n/a"} ` +
    `(${payload.denominator.toLocaleString()} postings in window)`;
  into.appendChild(caption);
  into.appendChild(shareBars(payload.shares));
  into.appendChild(tileMap(payload.by_country_top));
}

export function renderGender(payload: GenderResponse, state: ViewState, into: HTMLElement): void {
  if (payload.groups.length === 0) {
    into.appendChild(noData());
    return;
  }
  into.appendChild(genderBars(payload.groups, state.genderA, state.genderB));
}

export function makePanels(hosts: Record<string, PanelHost>, client?: PanelClient) {
  return {
    index: new Panel<IndexResponse>("index", hosts.index, renderIndex, client),
    supply: new Panel<SupplyResponse>("supply", hosts.supply, renderSupply, client),
    occupations: new Panel<DemandResponse>(
      "occupations",
      hosts.occupations,
      renderOccupations,
      client
    ),
    gender: new Panel<GenderResponse>("gender", hosts.gender, renderGender, client),
  };
}

export { downloadUrl };
