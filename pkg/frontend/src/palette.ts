/** Operation form catalogue: which parameters each op takes and how to turn
 * form strings into API params (ids and amounts become integers; rates and
 * unit names pass through as strings). */

export type FieldKind = "agent" | "uint" | "currency" | "commodity" | "unit" | "rational" | "agent_kind" | "text";

export interface Field {
  key: string;
  kind: FieldKind;
  optional?: boolean;
}

export interface OpForm {
  name: string;
  label: string;
  fields: Field[];
}

export const OP_FORMS: OpForm[] = [
  { name: "add_currency", label: "declare currency", fields: [{ key: "currency", kind: "currency" }] },
  { name: "add_commodity", label: "declare commodity", fields: [{ key: "commodity", kind: "commodity" }] },
  {
    name: "add_agent",
    label: "add agent",
    fields: [
      { key: "kind", kind: "agent_kind" },
      { key: "issues", kind: "currency", optional: true },
      { key: "label", kind: "text", optional: true },
    ],
  },
  {
    name: "mint_commodity",
    label: "mint commodity",
    fields: [
      { key: "agent", kind: "agent" },
      { key: "commodity", kind: "commodity" },
      { key: "qty", kind: "uint" },
    ],
  },
  {
    name: "transfer_commodity",
    label: "transfer commodity",
    fields: [
      { key: "from", kind: "agent" },
      { key: "to", kind: "agent" },
      { key: "commodity", kind: "commodity" },
      { key: "qty", kind: "uint" },
    ],
  },
  {
    name: "issue_convertible_note",
    label: "issue convertible note",
    fields: [
      { key: "issuer", kind: "agent" },
      { key: "holder", kind: "agent" },
      { key: "amount", kind: "uint" },
      { key: "currency", kind: "currency" },
      { key: "backing", kind: "unit" },
      { key: "rate", kind: "rational" },
    ],
  },
  {
    name: "create_loan",
    label: "create loan",
    fields: [
      { key: "bank", kind: "agent" },
      { key: "borrower", kind: "agent" },
      { key: "amount", kind: "uint" },
      { key: "currency", kind: "currency" },
    ],
  },
  {
    name: "repay_loan",
    label: "repay loan",
    fields: [
      { key: "loan", kind: "uint" },
      { key: "amount", kind: "uint" },
    ],
  },
  {
    name: "pay_deposit",
    label: "pay by deposit",
    fields: [
      { key: "payer", kind: "agent" },
      { key: "payee", kind: "agent" },
      { key: "amount", kind: "uint" },
      { key: "currency", kind: "currency" },
      { key: "payer_bank", kind: "agent", optional: true },
      { key: "payee_bank", kind: "agent", optional: true },
    ],
  },
  {
    name: "withdraw_cash",
    label: "withdraw cash",
    fields: [
      { key: "holder", kind: "agent" },
      { key: "amount", kind: "uint" },
      { key: "currency", kind: "currency", optional: true },
      { key: "bank", kind: "agent", optional: true },
    ],
  },
  {
    name: "deposit_cash",
    label: "deposit cash",
    fields: [
      { key: "holder", kind: "agent" },
      { key: "amount", kind: "uint" },
      { key: "currency", kind: "currency", optional: true },
      { key: "bank", kind: "agent", optional: true },
    ],
  },
  {
    name: "cb_open_market_purchase",
    label: "open-market purchase",
    fields: [
      { key: "cb", kind: "agent" },
      { key: "bank", kind: "agent" },
      { key: "bond", kind: "uint" },
      { key: "amount", kind: "uint" },
    ],
  },
  {
    name: "treasury_issue_bond",
    label: "issue bond",
    fields: [
      { key: "treasury", kind: "agent" },
      { key: "bank", kind: "agent" },
      { key: "amount", kind: "uint" },
    ],
  },
  {
    name: "treasury_spend",
    label: "treasury spend",
    fields: [
      { key: "treasury", kind: "agent" },
      { key: "recipient", kind: "agent" },
      { key: "amount", kind: "uint" },
      { key: "recipient_bank", kind: "agent", optional: true },
    ],
  },
  {
    name: "tax",
    label: "tax",
    fields: [
      { key: "treasury", kind: "agent" },
      { key: "payer", kind: "agent" },
      { key: "amount", kind: "uint" },
      { key: "payer_bank", kind: "agent", optional: true },
    ],
  },
  {
    name: "redeem",
    label: "redeem convertible",
    fields: [
      { key: "holder", kind: "agent" },
      { key: "amount", kind: "uint" },
      { key: "currency", kind: "currency" },
      { key: "asset", kind: "unit" },
      { key: "rate", kind: "rational" },
    ],
  },
];

const INT_KINDS: FieldKind[] = ["agent", "uint"];

/** Coerce raw form values; empty optionals drop out, integer fields must
 * parse exactly. Throws Error with a readable message otherwise. */
export function coerceParams(fields: Field[], raw: Record<string, string>): Record<string, unknown> {
  const params: Record<string, unknown> = {};
  for (const field of fields) {
    const value = (raw[field.key] ?? "").trim();
    if (!value) {
      if (field.optional) continue;
      throw new Error(`missing required field ${field.key}`);
    }
    if (INT_KINDS.includes(field.kind)) {
      if (!/^[0-9]+$/.test(value)) {
        throw new Error(`${field.key} must be a nonnegative integer`);
      }
      params[field.key] = Number.parseInt(value, 10);
    } else {
      params[field.key] = value;
    }
  }
  return params;
}
