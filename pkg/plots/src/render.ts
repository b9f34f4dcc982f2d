/**
 * Figure builders for the two harness plot kinds.
 *
 * regret_vs_t: one line per policy over checkpoints, shaded +/-2 stderr band,
 * the LB pseudo-policy dashed. regret_vs_epsilon: final-checkpoint regret per
 * privacy level on a log-x axis, the UB-ldp pseudo-policy dashed.
 *
 * Rendering is headless SVG at a fixed 1200x700 so output bytes are
 * reproducible; the option builders are exported separately so tests can
 * compare plotted values against the CSV without scraping markup.
 */

import { writeFileSync } from "fs";
import { basename, dirname, join } from "path";
import * as echarts from "echarts";
import {
  RegretRow,
  SchemaError,
  byPolicy,
  epsilonOf,
  finalRows,
  readRegretCsv,
} from "./schema";

export const WIDTH = 1200;
export const HEIGHT = 700;

export const LB_TAG = "LB";
export const UB_LDP_TAG = "UB-ldp";
const BOUND_TAGS = [LB_TAG, UB_LDP_TAG];

export type PlotKind = "regret_vs_t" | "regret_vs_epsilon";

export interface PlotSpec {
  inputs: string[];
  kind: PlotKind;
  out?: string;
  logX?: boolean;
}

const POLICY_COLORS: Record<string, string> = {
  "klucb-cf": "#1f77b4",
  "ts-cf": "#2ca02c",
  "ucb-cf": "#17becf",
  klucb: "#ff7f0e",
  ucb1: "#d62728",
  ts: "#9467bd",
  "wrapper:klucb": "#8c564b",
  "wrapper:ucb1": "#7f7f7f",
  "wrapper:ts": "#e377c2",
  [LB_TAG]: "#000000",
  [UB_LDP_TAG]: "#888888",
};
const FALLBACK_COLORS = ["#bcbd22", "#aec7e8", "#ffbb78", "#98df8a", "#ff9896"];

function colorFor(tag: string, index: number): string {
  return POLICY_COLORS[tag] ?? FALLBACK_COLORS[index % FALLBACK_COLORS.length];
}

function sortedTags(tags: Iterable<string>): string[] {
  // policies first in lexical order, bound curves last
  const all = [...tags];
  const policies = all.filter((t) => !BOUND_TAGS.includes(t)).sort();
  return policies.concat(BOUND_TAGS.filter((t) => all.includes(t)));
}

type SeriesList = Record<string, unknown>[];

function axisOptions(logX: boolean, xName: string) {
  return {
    xAxis: {
      type: logX ? ("log" as const) : ("value" as const),
      name: xName,
      nameLocation: "middle" as const,
      nameGap: 30,
    },
    yAxis: {
      type: "value" as const,
      name: "mean cumulative regret",
      nameLocation: "middle" as const,
      nameGap: 55,
    },
  };
}

export function regretVsTOption(rows: RegretRow[], logX = false): echarts.EChartsOption {
  const groups = byPolicy(rows);
  const tags = sortedTags(groups.keys());
  const series: SeriesList = [];
  tags.forEach((tag, i) => {
    const points = groups.get(tag)!;
    const isBound = BOUND_TAGS.includes(tag);
    const color = colorFor(tag, i);
    const hasBand = !isBound && points.some((p) => p.stderr > 0);
    if (hasBand) {
      // invisible base at mean - 2se, then a stacked span of 4se shaded
      series.push({
        name: `${tag} band base`,
        type: "line",
        stack: `band:${tag}`,
        data: points.map((p) => [p.t, p.mean_regret - 2 * p.stderr]),
        lineStyle: { opacity: 0 },
        symbol: "none",
        silent: true,
        tooltip: { show: false },
      });
      series.push({
        name: `${tag} band`,
        type: "line",
        stack: `band:${tag}`,
        data: points.map((p) => [p.t, 4 * p.stderr]),
        lineStyle: { opacity: 0 },
        areaStyle: { color, opacity: 0.15 },
        symbol: "none",
        silent: true,
        tooltip: { show: false },
      });
    }
    series.push({
      name: tag,
      type: "line",
      data: points.map((p) => [p.t, p.mean_regret]),
      itemStyle: { color },
      lineStyle: isBound ? { color, type: "dashed", width: 2 } : { color, width: 2 },
      symbol: "none",
    });
  });
  return {
    animation: false,
    legend: { data: tags, top: 10 },
    ...axisOptions(logX, "round t"),
    series: series as echarts.EChartsOption["series"],
  };
}

export interface SweepFile {
  epsilon: number;
  rows: RegretRow[];
}

export function regretVsEpsilonOption(
  files: SweepFile[],
  logX = true,
  warn: (message: string) => void = (m) => console.warn(m)
): echarts.EChartsOption {
  const sorted = [...files].sort((a, b) => a.epsilon - b.epsilon);
  const perTag = new Map<string, [number, number][]>();
  let missingUb = false;
  for (const file of sorted) {
    const finals = finalRows(file.rows);
    if (!finals.has(UB_LDP_TAG)) {
      missingUb = true;
    }
    for (const [tag, row] of finals) {
      if (tag === LB_TAG) {
        continue; // the non-private lower bound does not vary with epsilon
      }
      const points = perTag.get(tag) ?? [];
      points.push([file.epsilon, row.mean_regret]);
      perTag.set(tag, points);
    }
  }
  if (missingUb) {
    perTag.delete(UB_LDP_TAG);
    warn("some inputs carry no UB-ldp rows; plotting without the upper bound curve");
  }
  const tags = sortedTags(perTag.keys());
  const series: SeriesList = tags.map((tag, i) => {
    const isBound = tag === UB_LDP_TAG;
    const color = colorFor(tag, i);
    return {
      name: tag,
      type: "line",
      data: perTag.get(tag)!,
      itemStyle: { color },
      lineStyle: isBound ? { color, type: "dashed", width: 2 } : { color, width: 2 },
      symbol: "circle",
      symbolSize: 7,
    };
  });
  return {
    animation: false,
    legend: { data: tags, top: 10 },
    ...axisOptions(logX, "privacy level epsilon"),
    series: series as echarts.EChartsOption["series"],
  };
}

export function renderSvg(option: echarts.EChartsOption): string {
  const chart = echarts.init(null, null, {
    renderer: "svg",
    ssr: true,
    width: WIDTH,
    height: HEIGHT,
  });
  try {
    chart.setOption(option);
    return chart.renderToSVGString();
  } finally {
    chart.dispose();
  }
}

/** Output path next to the first input, named after it. */
export function defaultOut(spec: PlotSpec): string {
  const first = spec.inputs[0];
  const stem = basename(first).replace(/\.[^.]+$/, "");
  if (spec.kind === "regret_vs_t") {
    return join(dirname(first), `${stem}.svg`);
  }
  const base = stem.replace(/_eps[0-9]*\.?[0-9]+(?:e-?[0-9]+)?$/i, "");
  return join(dirname(first), `${base}_regret_vs_epsilon.svg`);
}

/** Validate inputs, build the figure, write the SVG; returns the output path. */
export function renderSpec(spec: PlotSpec, warn?: (message: string) => void): string {
  if (spec.inputs.length === 0) {
    throw new SchemaError("at least one input CSV is required");
  }
  let option: echarts.EChartsOption;
  if (spec.kind === "regret_vs_t") {
    if (spec.inputs.length !== 1) {
      throw new SchemaError("regret_vs_t takes exactly one input CSV");
    }
    option = regretVsTOption(readRegretCsv(spec.inputs[0]), spec.logX ?? false);
  } else {
    const files = spec.inputs.map((path) => ({
      epsilon: epsilonOf(path),
      rows: readRegretCsv(path),
    }));
    option = regretVsEpsilonOption(files, spec.logX ?? true, warn);
  }
  const out = spec.out ?? defaultOut(spec);
  const svg = renderSvg(option);
  writeFileSync(out, svg, "utf8");
  return out;
}
