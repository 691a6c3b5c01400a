// Payload shapes of the /v1 API.

export interface IndexPoint {
  date: string;
  value: number;
}

export interface LinkEvent {
  link_date: string;
  platforms_added: string[];
  link_factor: number;
}

export interface IndexResponse {
  snapshot_id: number;
  platform_domain: string;
  occupation: string | null;
  country: string | null;
  base_date: string;
  window_days: number;
  points: IndexPoint[];
  link_events: LinkEvent[];
}

export interface SupplyResponse {
  snapshot_id: number;
  as_of: string;
  window_days: number;
  occupation: string | null;
  denominator: number;
  shares: Record<string, number>;
}

export interface DemandResponse {
  snapshot_id: number;
  as_of: string;
  window_days: number;
  platform_domain: string;
  country: string | null;
  denominator: number;
  shares: Record<string, number>;
  top_category: string | null;
  by_country_top: Record<string, string>;
}

export interface GenderGroup {
  country: string | null;
  occupation: string | null;
  share_female: number | null;
  classified: number;
  coverage: number;
  female: number;
  male: number;
  unknown: number;
  total: number;
}

export interface GenderResponse {
  snapshot_id: number;
  group_by: string;
  groups: GenderGroup[];
}

export interface SnapshotInfo {
  snapshot_id: number;
  created_at: string;
  window_days: number;
  domains: Record<string, { first_date: string; last_date: string; base_date: string }>;
}
