// View state and its URL encoding. The URL is the single source of truth
// for what is on screen, so a copied link reproduces the identical view
// (and therefore the identical API queries).

export type Tab = "index" | "supply" | "occupations" | "gender";

export interface ViewState {
  tab: Tab;
  domain: "ALL" | "EN" | "ES" | "RU";
  occupation: string;
  country: string;
  dateFrom: string;
  dateTo: string;
  asOf: string;
  genderA: string;
  genderB: string;
  snapshotId: number | null; // last snapshot seen; display only, not in URL
}

export const TABS: Tab[] = ["index", "supply", "occupations", "gender"];

export const DEFAULT_STATE: ViewState = {
  tab: "index",
  domain: "ALL",
  occupation: "",
  country: "",
  dateFrom: "",
  dateTo: "",
  asOf: "",
  genderA: "US",
  genderB: "IN",
  snapshotId: null,
};

const URL_FIELDS: Array<[keyof ViewState, string]> = [
  ["tab", "tab"],
  ["domain", "domain"],
  ["occupation", "occupation"],
  ["country", "country"],
  ["dateFrom", "from"],
  ["dateTo", "to"],
  ["asOf", "as_of"],
  ["genderA", "ca"],
  ["genderB", "cb"],
];

export function encodeState(state: ViewState): string {
  const params = new URLSearchParams();
  for (const [field, key] of URL_FIELDS) {
    const value = state[field];
    if (typeof value === "string" && value !== "" && value !== DEFAULT_STATE[field]) {
      params.set(key, value);
    }
  }
  const text = params.toString();
  return text ? `?${text}` : "";
}

export function decodeState(search: string): ViewState {
  const params = new URLSearchParams(search);
  const state: ViewState = { ...DEFAULT_STATE };
  for (const [field, key] of URL_FIELDS) {
    const raw = params.get(key);
    if (raw === null) continue;
    if (field === "tab" && !TABS.includes(raw as Tab)) continue;
    if (field === "domain" && !["ALL", "EN", "ES", "RU"].includes(raw)) continue;
    (state as any)[field] = raw;
  }
  return state;
}
