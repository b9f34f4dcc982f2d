/**
 * The harness CSV contract: `t,policy,mean_regret,stderr,replications`,
 * one row per policy per checkpoint. Everything here validates against that
 * schema and nothing else; plotting never recomputes statistics.
 */

import { readFileSync } from "fs";
import { basename } from "path";
import Papa from "papaparse";

export const EXPECTED_COLUMNS = ["t", "policy", "mean_regret", "stderr", "replications"] as const;

export interface RegretRow {
  t: number;
  policy: string;
  mean_regret: number;
  stderr: number;
  replications: number;
}

export class SchemaError extends Error {}

function parseNumber(raw: string, column: string, line: number): number {
  const value = Number(raw);
  if (raw.trim() === "" || !Number.isFinite(value)) {
    throw new SchemaError(`line ${line}: column "${column}" is not a finite number: ${JSON.stringify(raw)}`);
  }
  return value;
}

function parseCount(raw: string, column: string, line: number): number {
  const value = parseNumber(raw, column, line);
  if (!Number.isInteger(value) || value < 0) {
    throw new SchemaError(`line ${line}: column "${column}" must be a nonnegative integer, got ${raw}`);
  }
  return value;
}

/** Parse harness CSV text, rejecting any header or cell that breaks the schema. */
export function parseRegretCsv(text: string): RegretRow[] {
  const parsed = Papa.parse<Record<string, string>>(text, {
    header: true,
    skipEmptyLines: true,
  });
  const fields = parsed.meta.fields ?? [];
  for (const expected of EXPECTED_COLUMNS) {
    if (!fields.includes(expected)) {
      throw new SchemaError(`missing column "${expected}" (header was: ${fields.join(",")})`);
    }
  }
  for (const field of fields) {
    if (!(EXPECTED_COLUMNS as readonly string[]).includes(field)) {
      throw new SchemaError(`unexpected column "${field}"`);
    }
  }
  if (parsed.data.length === 0) {
    throw new SchemaError("no data rows");
  }
  return parsed.data.map((raw, i) => {
    const line = i + 2; // header is line 1
    const policy = (raw.policy ?? "").trim();
    if (policy === "") {
      throw new SchemaError(`line ${line}: column "policy" is empty`);
    }
    const t = parseCount(raw.t, "t", line);
    if (t < 1) {
      throw new SchemaError(`line ${line}: column "t" must be >= 1, got ${raw.t}`);
    }
    return {
      t,
      policy,
      mean_regret: parseNumber(raw.mean_regret, "mean_regret", line),
      stderr: parseNumber(raw.stderr, "stderr", line),
      replications: parseCount(raw.replications, "replications", line),
    };
  });
}

export function readRegretCsv(path: string): RegretRow[] {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new SchemaError(`could not read ${path}: ${(err as Error).message}`);
  }
  try {
    return parseRegretCsv(text);
  } catch (err) {
    if (err instanceof SchemaError) {
      throw new SchemaError(`${path}: ${err.message}`);
    }
    throw err;
  }
}

/** Group rows by policy tag, preserving checkpoint order within each tag. */
export function byPolicy(rows: RegretRow[]): Map<string, RegretRow[]> {
  const out = new Map<string, RegretRow[]>();
  for (const row of rows) {
    const bucket = out.get(row.policy);
    if (bucket) {
      bucket.push(row);
    } else {
      out.set(row.policy, [row]);
    }
  }
  for (const bucket of out.values()) {
    bucket.sort((a, b) => a.t - b.t);
  }
  return out;
}

/** Final-checkpoint row per policy. */
export function finalRows(rows: RegretRow[]): Map<string, RegretRow> {
  const out = new Map<string, RegretRow>();
  for (const row of rows) {
    const seen = out.get(row.policy);
    if (!seen || row.t > seen.t) {
      out.set(row.policy, row);
    }
  }
  return out;
}

/**
 * The privacy level a sweep file was produced at. sweep_to_csv names files
 * `<stem>_eps<value>.csv`; fall back to the metadata sidecar for renamed
 * files.
 */
export function epsilonOf(path: string): number {
  const match = basename(path).match(/_eps([0-9]*\.?[0-9]+(?:e-?[0-9]+)?)\.[^.]+$/i);
  if (match) {
    return Number(match[1]);
  }
  const sidecar = path.replace(/\.[^.]+$/, ".meta.json");
  try {
    const meta = JSON.parse(readFileSync(sidecar, "utf8"));
    if (typeof meta.epsilon === "number") {
      return meta.epsilon;
    }
  } catch {
    // fall through to the error below
  }
  throw new SchemaError(
    `cannot determine epsilon for ${path}: expected an _eps<value> filename or an "epsilon" key in ${sidecar}`
  );
}
