// Thin typed client for the /v1 API with per-panel latest-wins requests.
// Query strings are assembled from the view state in exactly one place,
// so the download link and the fetches can never disagree.

import type { ViewState } from "./state.js";

export function indexQuery(state: ViewState): URLSearchParams {
  const params = new URLSearchParams();
  params.set("platform_domain", state.domain);
  if (state.occupation) params.set("occupation", state.occupation);
  if (state.country) params.set("country", state.country);
  if (state.dateFrom) params.set("from", state.dateFrom);
  if (state.dateTo) params.set("to", state.dateTo);
  return params;
}

export function supplyQuery(state: ViewState): URLSearchParams {
  const params = new URLSearchParams();
  if (state.asOf) params.set("as_of", state.asOf);
  if (state.occupation) params.set("occupation", state.occupation);
  return params;
}

export function demandQuery(state: ViewState): URLSearchParams {
  const params = new URLSearchParams();
  params.set("platform_domain", state.domain);
  if (state.asOf) params.set("as_of", state.asOf);
  if (state.country) params.set("country", state.country);
  return params;
}

export function genderQuery(_state: ViewState): URLSearchParams {
  const params = new URLSearchParams();
  params.set("group_by", "country_occupation");
  return params;
}

const ENDPOINTS = {
  index: "/v1/index",
  supply: "/v1/supply/countries",
  occupations: "/v1/demand/occupations",
  gender: "/v1/gender",
} as const;

const DATASETS = {
  index: "index",
  supply: "supply_countries",
  occupations: "demand_occupations",
  gender: "gender",
} as const;

export function panelQuery(tab: keyof typeof ENDPOINTS, state: ViewState): URLSearchParams {
  switch (tab) {
    case "index":
      return indexQuery(state);
    case "supply":
      return supplyQuery(state);
    case "occupations":
      return demandQuery(state);
    case "gender":
      return genderQuery(state);
  }
}

export function panelUrl(tab: keyof typeof ENDPOINTS, state: ViewState): string {
  const params = panelQuery(tab, state);
  const text = params.toString();
  return text ? `${ENDPOINTS[tab]}?${text}` : ENDPOINTS[tab];
}

export function downloadUrl(tab: keyof typeof ENDPOINTS, state: ViewState): string {
  const params = panelQuery(tab, state);
  params.set("dataset", DATASETS[tab]);
  return `/v1/export.csv?${params.toString()}`;
}

export class PanelClient {
  // One in-flight request per panel; a newer request aborts the older.
  private controllers = new Map<string, AbortController>();

  async fetchJson<T>(panel: string, url: string): Promise<T> {
    this.controllers.get(panel)?.abort();
    const controller = new AbortController();
    this.controllers.set(panel, controller);
    const response = await fetch(url, { signal: controller.signal });
    if (!response.ok) {
      throw new Error(`${url} -> HTTP ${response.status}`);
    }
    return (await response.json()) as T;
  }
}
