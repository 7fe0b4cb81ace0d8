/**
 * Run-artifact ingestion: the CSV/JSON files written by the solver CLI.
 *
 * Every file carries a schema_version; a mismatch is a hard error so stale
 * artifact layouts fail fast instead of rendering nonsense.
 */

import * as fs from "node:fs";
import * as path from "node:path";

export const SCHEMA_VERSION = 1;

export interface StateSample {
  t: number;
  p: [number, number, number];
  v: [number, number, number];
  q: [number, number, number, number];
  w: [number, number, number];
}

export interface TrajectoryData {
  nodes: StateSample[];
  dense: StateSample[];
}

export interface PulseSample {
  thruster: number;
  node: number;
  t: number;
  pulse: number;
  pulseRef: number;
  forwardFacing: boolean;
}

export interface IterateRecord {
  iteration: number;
  homotopy_updates: number;
  beta: number;
  cost: number;
  fuel_cost: number;
  eq_cost: number;
  [key: string]: number | string;
}

export interface IteratesData {
  tF: number;
  converged: boolean;
  fuelProxyImpulse: number;
  iterates: IterateRecord[];
}

export interface SweepRow {
  betaTrig: number;
  iterations: number;
  fuelProxyImpulse: number;
  converged: boolean;
}

export interface ScenarioGeometry {
  plumeRadius: number;
  approachRadius: number;
  approachHalfAngle: number;
  thrustN: number;
}

export interface RunArtifacts {
  trajectory: TrajectoryData;
  schedule: PulseSample[];
  iterates: IteratesData;
  geometry: ScenarioGeometry;
  sweep: SweepRow[] | null;
}

export class ArtifactError extends Error {}

function splitCsv(text: string): string[][] {
  return text
    .split(/\r?\n/)
    .filter((line) => line.length > 0)
    .map((line) => line.split(","));
}

function checkCsvSchema(rows: string[][], name: string): void {
  if (
    rows.length < 2 ||
    rows[0][0] !== "schema_version" ||
    Number(rows[0][1]) !== SCHEMA_VERSION
  ) {
    throw new ArtifactError(`schema_version mismatch in ${name}`);
  }
}

function stateFromCells(cells: string[]): Omit<StateSample, "t"> {
  const f = cells.map(Number);
  return {
    p: [f[0], f[1], f[2]],
    v: [f[3], f[4], f[5]],
    q: [f[6], f[7], f[8], f[9]],
    w: [f[10], f[11], f[12]],
  };
}

export function parseTrajectoryCsv(text: string): TrajectoryData {
  const rows = splitCsv(text);
  checkCsvSchema(rows, "trajectory.csv");
  const nodes: StateSample[] = [];
  const dense: StateSample[] = [];
  for (const row of rows.slice(2)) {
    const sample = { t: Number(row[2]), ...stateFromCells(row.slice(3)) };
    if (row[0] === "node") {
      nodes.push(sample);
    } else {
      dense.push(sample);
    }
  }
  if (nodes.length === 0) {
    throw new ArtifactError("trajectory.csv contains no node samples");
  }
  return { nodes, dense };
}

export function parseScheduleCsv(text: string): PulseSample[] {
  const rows = splitCsv(text);
  checkCsvSchema(rows, "schedule.csv");
  return rows.slice(2).map((row) => ({
    thruster: Number(row[0]),
    node: Number(row[1]),
    t: Number(row[2]),
    pulse: Number(row[3]),
    pulseRef: Number(row[4]),
    forwardFacing: row[5] === "1",
  }));
}

export function parseIteratesJson(text: string): IteratesData {
  const data = JSON.parse(text);
  if (data.schema_version !== SCHEMA_VERSION) {
    throw new ArtifactError("schema_version mismatch in iterates.json");
  }
  return {
    tF: data.t_f_s,
    converged: data.converged,
    fuelProxyImpulse: data.fuel_proxy_impulse_Ns,
    iterates: data.iterates ?? [],
  };
}

export function parseSweepCsv(text: string): SweepRow[] {
  const rows = splitCsv(text);
  checkCsvSchema(rows, "sweep.csv");
  return rows.slice(2).map((row) => ({
    betaTrig: Number(row[0]),
    iterations: Number(row[1]),
    fuelProxyImpulse: Number(row[3]),
    converged: row[4] === "1",
  }));
}

/** Minimal TOML scraping for the few scalar geometry keys we plot. */
export function parseScenarioGeometry(text: string): ScenarioGeometry {
  const scalar = (key: string): number => {
    const match = text.match(new RegExp(`^${key}\\s*=\\s*([-0-9.eE+]+)`, "m"));
    if (!match) {
      throw new ArtifactError(`scenario.toml is missing '${key}'`);
    }
    return Number(match[1]);
  };
  return {
    plumeRadius: scalar("plume_radius_m"),
    approachRadius: scalar("approach_radius_m"),
    approachHalfAngle: scalar("approach_half_angle_rad"),
    thrustN: scalar("thrust_n"),
  };
}

export function readRun(runDir: string): RunArtifacts {
  const read = (name: string, required = true): string | null => {
    const file = path.join(runDir, name);
    if (!fs.existsSync(file)) {
      if (required) {
        throw new ArtifactError(`missing artifact '${name}' in ${runDir}`);
      }
      return null;
    }
    return fs.readFileSync(file, "utf-8");
  };
  const sweepText = read("sweep.csv", false);
  return {
    trajectory: parseTrajectoryCsv(read("trajectory.csv")!),
    schedule: parseScheduleCsv(read("schedule.csv")!),
    iterates: parseIteratesJson(read("iterates.json")!),
    geometry: parseScenarioGeometry(read("scenario.toml")!),
    sweep: sweepText === null ? null : parseSweepCsv(sweepText),
  };
}
