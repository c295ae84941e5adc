import { mkdtempSync, readFileSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { describe, expect, it } from "vitest";

import { readCsv, requireColumns, series } from "../src/csv.js";
import { FIGURE_IDS, EXPECTED_INPUT, buildChart, fitLine, zeroCrossing } from "../src/recipes.js";
import { render } from "../src/render.js";

const FIXTURES = join(__dirname, "fixtures");

function tmpOut(name: string): string {
  return join(mkdtempSync(join(tmpdir(), "figs-")), name);
}

describe("csv", () => {
  it("reads the workbench header and types numbers", () => {
    const table = readCsv(join(FIXTURES, "spectrum.csv"));
    expect(table.header[0]).toBe("g2");
    expect(typeof table.rows[0].gap_exact).toBe("number");
    expect(table.rows.length).toBe(45);
  });

  it("reports missing columns by name", () => {
    const table = readCsv(join(FIXTURES, "spectrum.csv"));
    expect(() => requireColumns(table, ["g2", "nope"], "spectrum.csv")).toThrow(/nope/);
  });

  it("drops blank cells from paired series", () => {
    const table = readCsv(join(FIXTURES, "vqe_per_r.csv"));
    const pts = series(table, "r", "e_raw"); // e_raw only filled at r = 1
    expect(pts.length).toBeGreaterThan(0);
    expect(pts.every(([r]) => r === 1)).toBe(true);
  });
});

describe("landmark helpers", () => {
  it("interpolates zero crossings", () => {
    expect(zeroCrossing([[0, 2], [1, 1], [2, -1]])).toBeCloseTo(1.5, 12);
    expect(zeroCrossing([[0, 2], [1, 1]])).toBeNull();
  });

  it("fits exact lines", () => {
    const [slope, intercept] = fitLine([[1, 5], [3, 9], [5, 13]]);
    expect(slope).toBeCloseTo(2, 12);
    expect(intercept).toBeCloseTo(3, 12);
  });
});

describe("figure recipes on real sweeps", () => {
  it("renders every figure from its fixture without error", () => {
    for (const id of FIGURE_IDS) {
      const svg = render({
        id,
        input: join(FIXTURES, EXPECTED_INPUT[id]),
        output: tmpOut(`${id}.svg`),
      });
      expect(svg).toContain("<svg");
      expect(svg).toContain("</svg>");
      expect(svg).toContain("polyline");
    }
  });

  it("fig1 marks the zero-gap crossing near g2 = 20", () => {
    const table = readCsv(join(FIXTURES, "spectrum.csv"));
    const chart = buildChart("fig1", table, "spectrum.csv");
    expect(chart.series.map((s) => s.label)).toContain("gap (exact)");
    const marker = (chart.markers ?? [])[0];
    expect(marker).toBeDefined();
    expect(marker.x).toBeGreaterThan(19);
    expect(marker.x).toBeLessThan(21);
    expect(marker.y).toBe(0);
    const svg = render({ id: "fig1", input: join(FIXTURES, "spectrum.csv"), output: tmpOut("f1.svg") });
    expect(svg).toMatch(/gap = 0 at g2 = 20/);
  });

  it("fig4 draws one line per coupling with an extrapolated intercept marker", () => {
    const table = readCsv(join(FIXTURES, "vqe_per_r.csv"));
    const chart = buildChart("fig4", table, "vqe_per_r.csv");
    const groundRows = table.rows.filter((r) => String(r.ansatz).startsWith("GS"));
    const g2Values = [...new Set(groundRows.map((r) => Number(r.g2)))];
    expect(chart.series.length).toBe(g2Values.length);
    expect(chart.markers?.length).toBe(g2Values.length);
    // oracle: recompute the g2 = 1 intercept from per-r means
    const byR = new Map<number, number[]>();
    for (const row of groundRows) {
      if (Number(row.g2) !== 1) continue;
      const r = Number(row.r);
      byR.set(r, [...(byR.get(r) ?? []), Number(row.e_ro)]);
    }
    const means = [...byR.entries()]
      .map(([r, es]) => [r, es.reduce((a, b) => a + b, 0) / es.length] as [number, number])
      .sort((a, b) => a[0] - b[0]);
    const [, want] = fitLine(means);
    const marker = chart.markers!.find((m) => Math.abs(m.y - want) < 1e-9);
    expect(marker).toBeDefined();
    expect(marker!.x).toBe(0);
  });

  it("fig5 covers the excited family", () => {
    const table = readCsv(join(FIXTURES, "vqe_per_r.csv"));
    const chart = buildChart("fig5", table, "vqe_per_r.csv");
    expect(chart.title).toMatch(/excited/);
    expect(chart.markers?.length).toBeGreaterThan(0);
  });

  it("fig8 shows the gap falling toward the origin", () => {
    const table = readCsv(join(FIXTURES, "chiral.csv"));
    const chart = buildChart("fig8", table, "chiral.csv");
    const exact = chart.series.find((s) => s.label === "exact")!;
    const sorted = [...exact.points].sort((a, b) => a[0] - b[0]);
    for (let i = 1; i < sorted.length; i++) {
      expect(sorted[i][1]).toBeGreaterThan(sorted[i - 1][1]);
    }
    expect(sorted[0][1]).toBeLessThan(0.05 * sorted[sorted.length - 1][0]);
  });

  it("fig9 zooms near the origin", () => {
    const table = readCsv(join(FIXTURES, "chiral.csv"));
    const full = buildChart("fig8", table, "chiral.csv");
    const zoom = buildChart("fig9", table, "chiral.csv");
    const xsFull = full.series[0].points.map((p) => p[0]);
    const xsZoom = zoom.series[0].points.map((p) => p[0]);
    expect(Math.max(...xsZoom)).toBeLessThan(Math.max(...xsFull));
  });
});

describe("edge cases", () => {
  it("renders an empty-axes figure with a warning for header-only input", () => {
    const path = tmpOut("empty.csv");
    writeFileSync(path, "g2,e0_exact,e1_exact,gap_exact,e0_pt,e1_pt,gap_pt\n");
    const svg = render({ id: "fig1", input: path, output: tmpOut("empty.svg") });
    expect(svg).toContain("warning: input CSV held no data rows");
    expect(svg).not.toContain("polyline");
  });

  it("fails with a descriptive message when columns are missing", () => {
    const path = tmpOut("bad.csv");
    writeFileSync(path, "g2,oops\n1,2\n");
    expect(() => render({ id: "fig1", input: path, output: tmpOut("bad.svg") })).toThrow(
      /missing column\(s\).*e0_exact/,
    );
  });

  it("re-rendering is byte-identical", () => {
    const out1 = tmpOut("a.svg");
    const out2 = tmpOut("b.svg");
    render({ id: "fig3", input: join(FIXTURES, "critical_line.csv"), output: out1 });
    render({ id: "fig3", input: join(FIXTURES, "critical_line.csv"), output: out2 });
    expect(readFileSync(out1, "utf8")).toBe(readFileSync(out2, "utf8"));
  });
});
