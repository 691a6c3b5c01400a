import { beforeEach, describe, expect, it, vi } from "vitest";

import { Panel, renderSupply } from "../src/panels.js";
import { DEFAULT_STATE, type ViewState } from "../src/state.js";
import type { SupplyResponse } from "../src/types.js";

type Responder = (url: string) => SupplyResponse;

function supplyPayload(asOf: string, inShare: number): SupplyResponse {
  const rest = 1 - inShare - 0.15;
  return {
    snapshot_id: 7,
    as_of: asOf,
    window_days: 90,
    occupation: null,
    denominator: 10_000,
    shares: { IN: inShare, BD: 0.15, US: rest },
  };
}

function stateAt(asOf: string): ViewState {
  return { ...DEFAULT_STATE, tab: "supply", asOf };
}

describe("supply panel", () => {
  let calls: string[];
  let root: HTMLElement;
  let host: { root: HTMLElement; onSnapshot?: (id: number) => void };

  beforeEach(() => {
    calls = [];
    root = document.createElement("div");
    document.body.appendChild(root);
    host = { root };
  });

  function mockFetch(respond: Responder, delayed?: Map<string, () => void>) {
    vi.stubGlobal(
      "fetch",
      vi.fn((url: string, init?: { signal?: AbortSignal }) => {
        calls.push(url);
        return new Promise((resolve, reject) => {
          const deliver = () =>
            resolve(
              new Response(JSON.stringify(respond(url)), {
                status: 200,
                headers: { "content-type": "application/json" },
              })
            );
          init?.signal?.addEventListener("abort", () =>
            reject(new DOMException("aborted", "AbortError"))
          );
          if (delayed) {
            delayed.set(url, deliver);
          } else {
            deliver();
          }
        });
      })
    );
  }

  it("issues exactly one supply query per slider step and shows the share transition", async () => {
    mockFetch((url) => {
      const asOf = new URL(url, "http://x").searchParams.get("as_of")!;
      return supplyPayload(asOf, asOf === "2017-03-31" ? 0.25 : 0.33);
    });
    const panel = new Panel<SupplyResponse>("supply", host, renderSupply);

    await panel.refresh(stateAt("2017-03-31"));
    expect(calls).toEqual(["/v1/supply/countries?as_of=2017-03-31"]);
    let row = root.querySelector<HTMLElement>('.share-row[data-key="IN"]')!;
    expect(row.querySelector(".share-value")!.textContent).toBe("25.0%");

    await panel.refresh(stateAt("2021-03-31"));
    expect(calls).toHaveLength(2);
    expect(calls[1]).toBe("/v1/supply/countries?as_of=2021-03-31");
    row = root.querySelector<HTMLElement>('.share-row[data-key="IN"]')!;
    expect(row.querySelector(".share-value")!.textContent).toBe("33.0%");
  });

  it("cancels the in-flight request on rapid slider movement (latest wins)", async () => {
    const pending = new Map<string, () => void>();
    mockFetch((url) => {
      const asOf = new URL(url, "http://x").searchParams.get("as_of")!;
      return supplyPayload(asOf, asOf === "2018-01-01" ? 0.27 : 0.33);
    }, pending);
    const panel = new Panel<SupplyResponse>("supply", host, renderSupply);

    const first = panel.refresh(stateAt("2018-01-01"));
    const second = panel.refresh(stateAt("2021-03-31"));
    // deliver the latest; the first was aborted by the second
    pending.get("/v1/supply/countries?as_of=2021-03-31")!();
    await Promise.all([first, second]);

    const row = root.querySelector<HTMLElement>('.share-row[data-key="IN"]')!;
    expect(row.querySelector(".share-value")!.textContent).toBe("33.0%");
    expect(calls).toHaveLength(2);
  });

  it("shows an error banner with retry and never stale data", async () => {
    let failures = 1;
    vi.stubGlobal(
      "fetch",
      vi.fn((url: string) => {
        calls.push(url);
        if (failures-- > 0) {
          return Promise.resolve(new Response("boom", { status: 503 }));
        }
        return Promise.resolve(
          new Response(JSON.stringify(supplyPayload("2021-03-31", 0.33)), { status: 200 })
        );
      })
    );
    const panel = new Panel<SupplyResponse>("supply", host, renderSupply);
    await panel.refresh(stateAt("2021-03-31"));

    const banner = root.querySelector(".error-banner");
    expect(banner).not.toBeNull();
    expect(root.querySelector(".share-row")).toBeNull(); // nothing stale

    (banner!.querySelector(".retry") as HTMLButtonElement).click();
    await vi.waitFor(() => {
      expect(root.querySelector(".share-row")).not.toBeNull();
    });
    expect(calls).toHaveLength(2);
  });

  it("renders an explicit no-data state for an empty result", async () => {
    mockFetch((url) => ({
      snapshot_id: 7,
      as_of: "2021-03-31",
      window_days: 90,
      occupation: "unclassified",
      denominator: 0,
      shares: {},
    }));
    const panel = new Panel<SupplyResponse>("supply", host, renderSupply);
    await panel.refresh(stateAt("2021-03-31"));
    expect(root.querySelector(".no-data")).not.toBeNull();
  });
});
