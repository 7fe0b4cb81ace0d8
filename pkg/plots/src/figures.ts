/**
 * Figure builders: pure functions from run artifacts to echarts options.
 * Rendering to SVG happens separately; everything here is testable data.
 */

import type { EChartsOption, SeriesOption } from "echarts";

import {
  IterateRecord,
  PulseSample,
  RunArtifacts,
  StateSample,
} from "./artifacts.js";
import { quaternionToEuler, RAD_TO_DEG } from "./euler.js";

export const FIGURE_NAMES = [
  "trajectory",
  "attitude",
  "pulses",
  "convergence",
  "sweep",
] as const;
export type FigureName = (typeof FIGURE_NAMES)[number];

export class FigureSkipped extends Error {}

function circlePoints(radius: number, n = 181): [number, number][] {
  return Array.from({ length: n }, (_, i) => {
    const a = (2 * Math.PI * i) / (n - 1);
    return [radius * Math.cos(a), radius * Math.sin(a)] as [number, number];
  });
}

interface Projection {
  label: [string, string];
  pick: (s: StateSample) => [number, number];
  showCone: boolean;
}

const PROJECTIONS: Projection[] = [
  { label: ["x [m]", "y [m]"], pick: (s) => [s.p[0], s.p[1]], showCone: true },
  { label: ["x [m]", "z [m]"], pick: (s) => [s.p[0], s.p[2]], showCone: true },
  { label: ["y [m]", "z [m]"], pick: (s) => [s.p[1], s.p[2]], showCone: false },
];

export function trajectoryFigure(run: RunArtifacts): EChartsOption {
  const { nodes, dense } = run.trajectory;
  const geo = run.geometry;
  const grids = PROJECTIONS.map((_, i) => ({
    left: `${5 + i * 32}%`,
    width: "26%",
    top: 60,
    bottom: 50,
  }));
  const series: SeriesOption[] = [];
  PROJECTIONS.forEach((proj, i) => {
    const axes = { xAxisIndex: i, yAxisIndex: i };
    series.push({
      name: i === 0 ? "dense propagation" : undefined,
      type: "line",
      data: dense.map(proj.pick),
      showSymbol: false,
      lineStyle: { width: 1.5 },
      color: "#1f4e9c",
      ...axes,
    });
    series.push({
      name: i === 0 ? "nodes" : undefined,
      type: "scatter",
      data: nodes.map(proj.pick),
      symbolSize: 5,
      color: "#c03028",
      ...axes,
    });
    series.push({
      type: "line",
      data: circlePoints(geo.approachRadius),
      showSymbol: false,
      lineStyle: { type: "dashed", width: 1 },
      color: "#2c7fb8",
      ...axes,
    });
    series.push({
      type: "line",
      data: circlePoints(geo.plumeRadius),
      showSymbol: false,
      lineStyle: { type: "dashed", width: 1 },
      color: "#d7301f",
      ...axes,
    });
    if (proj.showCone) {
      const tan = Math.tan(geo.approachHalfAngle);
      const r = geo.approachRadius;
      for (const sign of [1, -1]) {
        series.push({
          type: "line",
          data: [
            [0, 0],
            [r, sign * tan * r],
          ],
          showSymbol: false,
          lineStyle: { type: "dotted", width: 1 },
          color: "#1a9850",
          ...axes,
        });
      }
    }
  });
  return {
    animation: false,
    title: { text: "Trajectory projections (target frame)", left: "center" },
    legend: { top: 28 },
    grid: grids,
    xAxis: PROJECTIONS.map((p, i) => ({
      gridIndex: i,
      name: p.label[0],
      type: "value",
    })),
    yAxis: PROJECTIONS.map((p, i) => ({
      gridIndex: i,
      name: p.label[1],
      type: "value",
      scale: true,
    })),
    series,
  };
}

export function attitudeSeries(dense: StateSample[]) {
  return dense.map((s) => {
    const e = quaternionToEuler(s.q);
    return {
      t: s.t,
      yaw: e.yaw * RAD_TO_DEG,
      pitch: e.pitch * RAD_TO_DEG,
      roll: e.roll * RAD_TO_DEG,
    };
  });
}

export function attitudeFigure(run: RunArtifacts): EChartsOption {
  const rows = attitudeSeries(run.trajectory.dense);
  const mk = (key: "yaw" | "pitch" | "roll"): SeriesOption => ({
    name: key,
    type: "line",
    showSymbol: false,
    data: rows.map((r) => [r.t, r[key]]),
  });
  return {
    animation: false,
    title: { text: "Attitude history (yaw-pitch-roll)", left: "center" },
    legend: { top: 28 },
    grid: { top: 60, bottom: 50 },
    xAxis: { name: "t [s]", type: "value" },
    yAxis: { name: "angle [deg]", type: "value" },
    series: ["yaw", "pitch", "roll"].map((k) => mk(k as "yaw")),
  };
}

export function pulseQuads(schedule: PulseSample[]): Map<string, PulseSample[]> {
  const thrusters = new Set(schedule.map((s) => s.thruster));
  const quadCount = thrusters.size % 4 === 0 ? thrusters.size / 4 : 1;
  const groups = new Map<string, PulseSample[]>();
  for (const s of schedule) {
    const quad =
      quadCount > 1
        ? String.fromCharCode(65 + Math.floor(s.thruster / 4))
        : "all";
    const key = `quad ${quad}`;
    if (!groups.has(key)) {
      groups.set(key, []);
    }
    groups.get(key)!.push(s);
  }
  return groups;
}

export function pulsesFigure(run: RunArtifacts, thrustN: number): EChartsOption {
  const groups = [...pulseQuads(run.schedule).entries()];
  const cols = Math.min(2, groups.length);
  const rowsN = Math.ceil(groups.length / cols);
  const series: SeriesOption[] = [];
  groups.forEach(([, samples], gi) => {
    const byThruster = new Map<number, PulseSample[]>();
    for (const s of samples) {
      if (!byThruster.has(s.thruster)) {
        byThruster.set(s.thruster, []);
      }
      byThruster.get(s.thruster)!.push(s);
    }
    for (const [thr, rows] of byThruster) {
      series.push({
        name: `thruster ${thr}`,
        type: "scatter",
        symbolSize: 6,
        xAxisIndex: gi,
        yAxisIndex: gi,
        data: rows
          .filter((r) => r.pulse > 1e-6)
          .map((r) => [r.t, r.pulse * thrustN]),
      });
    }
  });
  return {
    animation: false,
    title: { text: "Thruster impulse history", left: "center" },
    grid: groups.map((_, gi) => ({
      left: `${8 + (gi % cols) * 48}%`,
      width: "40%",
      top: `${12 + Math.floor(gi / cols) * (80 / rowsN)}%`,
      height: `${Math.max(10, 72 / rowsN)}%`,
    })),
    xAxis: groups.map((g, gi) => ({
      gridIndex: gi,
      name: gi === groups.length - 1 ? "t [s]" : g[0],
      type: "value",
    })),
    yAxis: groups.map((_, gi) => ({
      gridIndex: gi,
      name: "impulse [N s]",
      type: "value",
    })),
    series,
  };
}

export function homotopyUpdateIterations(iterates: IterateRecord[]): number[] {
  const updates: number[] = [];
  let last = 0;
  for (const rec of iterates) {
    if (rec.homotopy_updates > last) {
      updates.push(rec.iteration);
      last = rec.homotopy_updates;
    }
  }
  return updates;
}

export function convergenceFigure(run: RunArtifacts): EChartsOption {
  const iterates = run.iterates.iterates;
  if (iterates.length === 0) {
    throw new FigureSkipped("iterate log is empty; skipping convergence figure");
  }
  const updates = homotopyUpdateIterations(iterates);
  return {
    animation: false,
    title: { text: "Cost and sharpness per iteration", left: "center" },
    legend: { top: 28 },
    grid: [
      { left: "8%", width: "40%", top: 60, bottom: 50 },
      { left: "56%", width: "40%", top: 60, bottom: 50 },
    ],
    xAxis: [
      { gridIndex: 0, name: "iteration", type: "value" },
      { gridIndex: 1, name: "iteration", type: "value" },
    ],
    yAxis: [
      { gridIndex: 0, name: "cost", type: "log" },
      { gridIndex: 1, name: "sharpness", type: "log" },
    ],
    series: [
      {
        name: "subproblem cost",
        type: "line",
        data: iterates.map((r) => [r.iteration, r.cost]),
        xAxisIndex: 0,
        yAxisIndex: 0,
        markLine: {
          silent: true,
          symbol: "none",
          lineStyle: { type: "dashed", color: "#c03028" },
          data: updates.map((it) => ({ xAxis: it })),
        },
      },
      {
        name: "sharpness",
        type: "line",
        step: "end",
        data: iterates.map((r) => [r.iteration, r.beta]),
        xAxisIndex: 1,
        yAxisIndex: 1,
      },
    ],
  };
}

export function sweepFigure(run: RunArtifacts): EChartsOption {
  if (!run.sweep || run.sweep.length === 0) {
    throw new FigureSkipped("no sweep.csv in run directory; skipping sweep figure");
  }
  const rows = [...run.sweep].sort((a, b) => a.betaTrig - b.betaTrig);
  return {
    animation: false,
    title: { text: "Homotopy trigger sweep", left: "center" },
    legend: { top: 28 },
    grid: [
      { left: "8%", width: "40%", top: 60, bottom: 50 },
      { left: "56%", width: "40%", top: 60, bottom: 50 },
    ],
    xAxis: [
      { gridIndex: 0, name: "trigger", type: "log" },
      { gridIndex: 1, name: "trigger", type: "log" },
    ],
    yAxis: [
      { gridIndex: 0, name: "iterations", type: "value" },
      { gridIndex: 1, name: "impulse [N s]", type: "value", scale: true },
    ],
    series: [
      {
        name: "iterations",
        type: "line",
        data: rows.map((r) => [r.betaTrig, r.iterations]),
        xAxisIndex: 0,
        yAxisIndex: 0,
      },
      {
        name: "fuel proxy",
        type: "line",
        data: rows.map((r) => [r.betaTrig, r.fuelProxyImpulse]),
        xAxisIndex: 1,
        yAxisIndex: 1,
      },
    ],
  };
}

export function buildFigure(name: FigureName, run: RunArtifacts): EChartsOption {
  switch (name) {
    case "trajectory":
      return trajectoryFigure(run);
    case "attitude":
      return attitudeFigure(run);
    case "pulses":
      return pulsesFigure(run, run.geometry.thrustN);
    case "convergence":
      return convergenceFigure(run);
    case "sweep":
      return sweepFigure(run);
  }
}
