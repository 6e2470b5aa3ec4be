/**
 * Wire types for the moneygraph session API.
 *
 * Every monetary quantity is a decimal string and is rendered verbatim:
 * the client never parses amounts into numbers, so it can never do ledger
 * arithmetic of its own.
 */

export interface RegimeJson {
  kind: string;
  full_backing?: boolean;
}

export interface AgentJson {
  id: number;
  kind: string;
  currency: string | null;
  label: string | null;
  commodities: Record<string, string>;
}

export interface RedemptionJson {
  target: string;
  rate: string;
}

export interface InstrumentJson {
  id: number;
  kind: string;
  debtor: number;
  creditor: number;
  currency: string;
  amount: string;
  redemption: RedemptionJson | null;
}

export interface Snapshot {
  regime: RegimeJson;
  config: Record<string, boolean>;
  currencies: string[];
  commodities: string[];
  agents: AgentJson[];
  instruments: InstrumentJson[];
}

export interface MeasureReport {
  currency: string;
  base_money: string;
  broad_money: string;
  net_money: string;
  sector_positions: Record<string, string>;
}

export interface SheetJson {
  agent: number;
  unit: string;
  assets: [string, string][];
  liabilities: [string, string][];
  net_worth: string;
}

export interface OpResponse {
  ok: boolean;
  result: Record<string, number>;
  measures: MeasureReport[];
}

export interface HistoryEntry {
  name: string;
  params: Record<string, unknown>;
  ok: boolean;
  code?: string;
}
