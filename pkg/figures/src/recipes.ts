import { Table, requireColumns, series } from "./csv.js";
import { ChartSpec, Marker, PALETTE, Series } from "./svg.js";

export type FigureId =
  | "fig1" | "fig2" | "fig3" | "fig4" | "fig5" | "fig6" | "fig7" | "fig8" | "fig9";

export interface FigureRecipe {
  id: FigureId;
  /** one CSV per figure; fig4/fig5 read the per-multiplicity table */
  input: string;
  output: string;
}

export const FIGURE_IDS: FigureId[] = [
  "fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9",
];

/** Input CSV kind for each figure, by the workbench's output file names. */
export const EXPECTED_INPUT: Record<FigureId, string> = {
  fig1: "spectrum.csv",
  fig2: "spectrum.csv",
  fig3: "critical_line.csv",
  fig4: "vqe_per_r.csv",
  fig5: "vqe_per_r.csv",
  fig6: "vqe.csv",
  fig7: "vqe.csv",
  fig8: "chiral.csv",
  fig9: "chiral.csv",
};

/** First zero crossing of a sorted (x, y) polyline, by linear interpolation. */
export function zeroCrossing(points: Array<[number, number]>): number | null {
  const sorted = [...points].sort((a, b) => a[0] - b[0]);
  for (let i = 1; i < sorted.length; i++) {
    const [xa, ya] = sorted[i - 1];
    const [xb, yb] = sorted[i];
    if (ya === 0) return xa;
    if (ya > 0 !== yb > 0) return xa + (xb - xa) * (ya / (ya - yb));
  }
  return null;
}

/** Ordinary least-squares line through the points: [slope, intercept]. */
export function fitLine(points: Array<[number, number]>): [number, number] {
  const n = points.length;
  const mx = points.reduce((a, p) => a + p[0], 0) / n;
  const my = points.reduce((a, p) => a + p[1], 0) / n;
  let sxx = 0;
  let sxy = 0;
  for (const [x, y] of points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  const slope = sxy / sxx;
  return [slope, my - slope * mx];
}

function emptySpec(title: string, xLabel: string, yLabel: string): ChartSpec {
  return {
    title,
    xLabel,
    yLabel,
    series: [],
    annotations: ["warning: input CSV held no data rows"],
  };
}

function spectrumFigure(table: Table, path: string, zoom: boolean): ChartSpec {
  requireColumns(table, ["g2", "e0_exact", "e1_exact", "gap_exact", "gap_pt"], path);
  const title = zoom
    ? "Mass gap near the critical coupling"
    : "Energies and mass gap vs coupling";
  if (table.rows.length === 0) return emptySpec(title, "g2", "energy");
  const gap = series(table, "g2", "gap_exact");
  const crossing = zeroCrossing(gap);
  let view = table;
  if (zoom && crossing !== null) {
    view = {
      header: table.header,
      rows: table.rows.filter((r) => Math.abs(Number(r.g2) - crossing) <= 4.0),
    };
  }
  const curves: Series[] = zoom
    ? [
        { label: "gap (exact)", points: series(view, "g2", "gap_exact"), color: PALETTE[0] },
        { label: "gap (1st order)", points: series(view, "g2", "gap_pt"), color: PALETTE[1], dashed: true },
      ]
    : [
        { label: "E0 (exact)", points: series(view, "g2", "e0_exact"), color: PALETTE[0] },
        { label: "E1 (exact)", points: series(view, "g2", "e1_exact"), color: PALETTE[2] },
        { label: "gap (exact)", points: series(view, "g2", "gap_exact"), color: PALETTE[1] },
        { label: "gap (1st order)", points: series(view, "g2", "gap_pt"), color: PALETTE[3], dashed: true },
      ];
  const markers: Marker[] = [];
  const annotations: string[] = [];
  if (crossing !== null) {
    markers.push({ x: crossing, y: 0, label: `gap = 0 at g2 = ${crossing.toFixed(2)}` });
  } else {
    annotations.push("no zero-gap crossing inside the sweep");
  }
  return { title, xLabel: "g2", yLabel: "energy", series: curves, markers, annotations };
}

function criticalLineFigure(table: Table, path: string): ChartSpec {
  requireColumns(table, ["m0", "g2_crit_exact", "g2_crit_pt", "g2_crit_asymptotic"], path);
  if (table.rows.length === 0) return emptySpec("Critical line", "g2_crit", "m0");
  const flip = (pts: Array<[number, number]>): Array<[number, number]> =>
    pts.map(([a, b]) => [b, a]);
  return {
    title: "Critical line (gap vanishes)",
    xLabel: "g2_crit",
    yLabel: "m0",
    series: [
      { label: "exact", points: flip(series(table, "m0", "g2_crit_exact")), color: PALETTE[0] },
      { label: "1st order", points: flip(series(table, "m0", "g2_crit_pt")), color: PALETTE[1], dashed: true },
      { label: "2 m0", points: flip(series(table, "m0", "g2_crit_asymptotic")), color: PALETTE[5], dashed: true },
    ],
  };
}

function perMultiplicityFigure(table: Table, path: string, excited: boolean): ChartSpec {
  requireColumns(table, ["g2", "ansatz", "r", "rep", "e_ro"], path);
  const title = excited
    ? "CNOT extrapolation, excited-level functional"
    : "CNOT extrapolation, ground-level functional";
  const wantGround = !excited;
  const rows = table.rows.filter((r) => {
    const isGround = String(r.ansatz).startsWith("GS");
    return isGround === wantGround;
  });
  if (rows.length === 0) return emptySpec(title, "CNOTs per CNOT", "energy");
  const byG2 = new Map<number, Map<number, number[]>>();
  for (const row of rows) {
    const g2 = Number(row.g2);
    const r = Number(row.r);
    const e = Number(row.e_ro);
    if (!Number.isFinite(g2) || !Number.isFinite(r) || !Number.isFinite(e)) continue;
    if (!byG2.has(g2)) byG2.set(g2, new Map());
    const byR = byG2.get(g2)!;
    if (!byR.has(r)) byR.set(r, []);
    byR.get(r)!.push(e);
  }
  const curves: Series[] = [];
  const markers: Marker[] = [];
  let color = 0;
  for (const g2 of [...byG2.keys()].sort((a, b) => a - b)) {
    const byR = byG2.get(g2)!;
    const means: Array<[number, number]> = [...byR.entries()]
      .map(([r, es]) => [r, es.reduce((a, b) => a + b, 0) / es.length] as [number, number])
      .sort((a, b) => a[0] - b[0]);
    curves.push({
      label: `g2 = ${g2}`,
      points: means,
      color: PALETTE[color % PALETTE.length],
      showDots: true,
    });
    if (means.length >= 2) {
      const [, intercept] = fitLine(means);
      markers.push({
        x: 0,
        y: intercept,
        label: `r->0: ${intercept.toFixed(3)}`,
        color: PALETTE[color % PALETTE.length],
      });
    }
    color += 1;
  }
  return {
    title,
    xLabel: "CNOTs per CNOT (r)",
    yLabel: "energy",
    series: curves,
    markers,
    annotations: ["markers: linear extrapolation to the zero-CNOT limit"],
  };
}

function vqeFigure(table: Table, path: string, excited: boolean): ChartSpec {
  requireColumns(table, ["g2", "ansatz", "e_raw", "e_ro", "e_zne", "e_exact_mode"], path);
  const title = excited
    ? "Excited-level energy vs coupling (measured)"
    : "Ground-level energy vs coupling (measured)";
  const want = excited ? "ES" : "GS";
  const rows = table.rows.filter((r) => String(r.ansatz).startsWith(want));
  if (rows.length === 0) return emptySpec(title, "g2", "energy");
  const view: Table = { header: table.header, rows };
  return {
    title,
    xLabel: "g2",
    yLabel: "energy",
    series: [
      { label: "raw", points: series(view, "g2", "e_raw"), color: PALETTE[4], showDots: true },
      { label: "RO corrected", points: series(view, "g2", "e_ro"), color: PALETTE[2], showDots: true },
      { label: "extrapolated", points: series(view, "g2", "e_zne"), color: PALETTE[0], showDots: true },
      { label: "classical minimum", points: series(view, "g2", "e_exact_mode"), color: PALETTE[1], dashed: true },
    ],
  };
}

function chiralFigure(table: Table, path: string, zoom: boolean): ChartSpec {
  requireColumns(table, ["m0", "g2", "gap_exact", "gap_pt", "gap_vqe"], path);
  const title = zoom
    ? "Mass gap near the origin of the sampling line"
    : "Mass gap along the sampling line m0 = (2/3) g2";
  let rows = table.rows;
  if (zoom) {
    const cutoff = Math.max(...rows.map((r) => Number(r.m0))) / 4;
    rows = rows.filter((r) => Number(r.m0) <= cutoff);
  }
  if (rows.length === 0) return emptySpec(title, "m0", "gap");
  const view: Table = { header: table.header, rows };
  return {
    title,
    xLabel: "m0",
    yLabel: "mass gap",
    series: [
      { label: "exact", points: series(view, "m0", "gap_exact"), color: PALETTE[0], showDots: true },
      { label: "1st order", points: series(view, "m0", "gap_pt"), color: PALETTE[1], dashed: true },
      { label: "variational", points: series(view, "m0", "gap_vqe"), color: PALETTE[2], showDots: true },
    ],
  };
}

export function buildChart(id: FigureId, table: Table, path: string): ChartSpec {
  switch (id) {
    case "fig1":
      return spectrumFigure(table, path, false);
    case "fig2":
      return spectrumFigure(table, path, true);
    case "fig3":
      return criticalLineFigure(table, path);
    case "fig4":
      return perMultiplicityFigure(table, path, false);
    case "fig5":
      return perMultiplicityFigure(table, path, true);
    case "fig6":
      return vqeFigure(table, path, false);
    case "fig7":
      return vqeFigure(table, path, true);
    case "fig8":
      return chiralFigure(table, path, false);
    case "fig9":
      return chiralFigure(table, path, true);
  }
}
