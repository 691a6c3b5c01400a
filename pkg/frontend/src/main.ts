// Bootstrap: wire controls to state, state to the URL, and the URL to
// exactly one API query per visible panel.

import { downloadUrl } from "./api.js";
import { makePanels } from "./panels.js";
import { DEFAULT_STATE, TABS, decodeState, encodeState, type ViewState } from "./state.js";
import type { SnapshotInfo } from "./types.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

export function startApp(): void {
  let state: ViewState = decodeState(location.search);

  const hosts = {
    index: { root: el("panel-index"), onSnapshot: setSnapshot },
    supply: { root: el("panel-supply"), onSnapshot: setSnapshot },
    occupations: { root: el("panel-occupations"), onSnapshot: setSnapshot },
    gender: { root: el("panel-gender"), onSnapshot: setSnapshot },
  };
  const panels = makePanels(hosts);

  const slider = el<HTMLInputElement>("as-of-slider");
  const sliderLabel = el<HTMLElement>("as-of-label");
  let sliderDates: string[] = [];

  function setSnapshot(snapshotId: number): void {
    state.snapshotId = snapshotId;
    el("snapshot-badge").textContent = `snapshot ${snapshotId}`;
  }

  function syncControls(): void {
    el<HTMLSelectElement>("domain-select").value = state.domain;
    el<HTMLSelectElement>("occupation-select").value = state.occupation;
    el<HTMLInputElement>("country-input").value = state.country;
    el<HTMLInputElement>("from-input").value = state.dateFrom;
    el<HTMLInputElement>("to-input").value = state.dateTo;
    el<HTMLInputElement>("gender-a").value = state.genderA;
    el<HTMLInputElement>("gender-b").value = state.genderB;
    if (sliderDates.length && state.asOf) {
      const i = sliderDates.indexOf(state.asOf);
      if (i >= 0) slider.value = String(i);
    }
    sliderLabel.textContent = state.asOf || "latest";
    for (const tab of TABS) {
      el(`tab-${tab}`).classList.toggle("active", tab === state.tab);
      el(`section-${tab}`).style.display = tab === state.tab ? "" : "none";
    }
    el<HTMLAnchorElement>("download-link").setAttribute(
      "href",
      downloadUrl(state.tab === "occupations" ? "occupations" : state.tab, state)
    );
  }

  function pushUrl(): void {
    const query = encodeState(state);
    history.pushState(null, "", query || location.pathname);
  }

  function refreshActive(): void {
    syncControls();
    void panels[state.tab].refresh(state);
  }

  function update(patch: Partial<ViewState>, push = true): void {
    state = { ...state, ...patch };
    if (push) pushUrl();
    refreshActive();
  }

  for (const tab of TABS) {
    el(`tab-${tab}`).addEventListener("click", () => update({ tab }));
  }
  el<HTMLSelectElement>("domain-select").addEventListener("change", (e) =>
    update({ domain: (e.target as HTMLSelectElement).value as ViewState["domain"] })
  );
  el<HTMLSelectElement>("occupation-select").addEventListener("change", (e) =>
    update({ occupation: (e.target as HTMLSelectElement).value })
  );
  el<HTMLInputElement>("country-input").addEventListener("change", (e) =>
    update({ country: (e.target as HTMLInputElement).value.trim() })
  );
  el<HTMLInputElement>("from-input").addEventListener("change", (e) =>
    update({ dateFrom: (e.target as HTMLInputElement).value })
  );
  el<HTMLInputElement>("to-input").addEventListener("change", (e) =>
    update({ dateTo: (e.target as HTMLInputElement).value })
  );
  el<HTMLInputElement>("gender-a").addEventListener("change", (e) =>
    update({ genderA: (e.target as HTMLInputElement).value.trim().toUpperCase() })
  );
  el<HTMLInputElement>("gender-b").addEventListener("change", (e) =>
    update({ genderB: (e.target as HTMLInputElement).value.trim().toUpperCase() })
  );
  slider.addEventListener("input", () => {
    const chosen = sliderDates[Number(slider.value)];
    if (chosen) update({ asOf: chosen });
  });

  window.addEventListener("popstate", () => {
    state = decodeState(location.search);
    refreshActive();
  });

  // Seed the slider range from the snapshot metadata, then render.
  void (async () => {
    try {
      const response = await fetch("/v1/snapshot");
      if (response.ok) {
        const info = (await response.json()) as SnapshotInfo;
        const meta = info.domains["ALL"];
        if (meta) {
          sliderDates = dateRange(meta.first_date, meta.last_date);
          slider.min = "0";
          slider.max = String(sliderDates.length - 1);
          if (!state.asOf) state.asOf = meta.last_date;
          slider.value = String(sliderDates.indexOf(state.asOf));
        }
        setSnapshot(info.snapshot_id);
      }
    } catch {
      // panel fetches will surface the error banner
    }
    refreshActive();
  })();
}

function dateRange(first: string, last: string): string[] {
  const out: string[] = [];
  const end = new Date(`${last}T00:00:00Z`).getTime();
  let cursor = new Date(`${first}T00:00:00Z`).getTime();
  const day = 86_400_000;
  while (cursor <= end) {
    out.push(new Date(cursor).toISOString().slice(0, 10));
    cursor += day;
  }
  return out;
}

export { DEFAULT_STATE };

if (typeof document !== "undefined" && document.getElementById("panel-index")) {
  startApp();
}
