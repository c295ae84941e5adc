/** Minimal SVG line-chart core: linear scales, nice ticks, polylines,
 * point markers, a legend, and free annotations. No DOM, no canvas. */

export interface Series {
  label: string;
  points: Array<[number, number]>;
  color: string;
  dashed?: boolean;
  showDots?: boolean;
}

export interface Marker {
  x: number;
  y: number;
  label?: string;
  color?: string;
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  markers?: Marker[];
  annotations?: string[];
  width?: number;
  height?: number;
  xDomain?: [number, number];
  yDomain?: [number, number];
}

const MARGIN = { top: 42, right: 24, bottom: 48, left: 64 };

export const PALETTE = ["#1f5fa8", "#c03a2b", "#2d8a4e", "#8450a8", "#c07f2b", "#3a8f8f"];

function niceTicks(lo: number, hi: number, count = 6): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step0 = span / Math.max(count - 1, 1);
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  const candidates = [1, 2, 2.5, 5, 10].map((m) => m * mag);
  const step = candidates.find((c) => span / c <= count) ?? candidates[candidates.length - 1];
  const start = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= hi + 1e-12 * span; v += step) ticks.push(v);
  return ticks;
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1000 || a < 0.01) return v.toExponential(1);
  return Number(v.toPrecision(4)).toString();
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderChart(spec: ChartSpec): string {
  const width = spec.width ?? 640;
  const height = spec.height ?? 420;
  const innerW = width - MARGIN.left - MARGIN.right;
  const innerH = height - MARGIN.top - MARGIN.bottom;

  const allPoints = spec.series.flatMap((s) => s.points);
  const markerPoints = (spec.markers ?? []).map((m) => [m.x, m.y] as [number, number]);
  const xs = allPoints.map((p) => p[0]).concat(markerPoints.map((p) => p[0]));
  const ys = allPoints.map((p) => p[1]).concat(markerPoints.map((p) => p[1]));
  const empty = xs.length === 0;

  let [x0, x1] = spec.xDomain ?? (empty ? [0, 1] : [Math.min(...xs), Math.max(...xs)]);
  let [y0, y1] = spec.yDomain ?? (empty ? [0, 1] : [Math.min(...ys), Math.max(...ys)]);
  if (x1 === x0) [x0, x1] = [x0 - 1, x1 + 1];
  if (y1 === y0) [y0, y1] = [y0 - 1, y1 + 1];
  const yPad = 0.05 * (y1 - y0);
  if (!spec.yDomain) [y0, y1] = [y0 - yPad, y1 + yPad];

  const sx = (v: number) => MARGIN.left + ((v - x0) / (x1 - x0)) * innerW;
  const sy = (v: number) => MARGIN.top + innerH - ((v - y0) / (y1 - y0)) * innerH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(
    `<text x="${width / 2}" y="20" text-anchor="middle" font-size="15">${escapeXml(spec.title)}</text>`,
  );

  // frame and ticks
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${innerW}" height="${innerH}" ` +
      `fill="none" stroke="#444"/>`,
  );
  for (const t of niceTicks(x0, x1)) {
    const px = sx(t);
    parts.push(`<line x1="${px}" y1="${MARGIN.top + innerH}" x2="${px}" y2="${MARGIN.top + innerH + 5}" stroke="#444"/>`);
    parts.push(`<text x="${px}" y="${MARGIN.top + innerH + 18}" text-anchor="middle">${fmt(t)}</text>`);
    parts.push(`<line x1="${px}" y1="${MARGIN.top}" x2="${px}" y2="${MARGIN.top + innerH}" stroke="#eee"/>`);
  }
  for (const t of niceTicks(y0, y1)) {
    const py = sy(t);
    parts.push(`<line x1="${MARGIN.left - 5}" y1="${py}" x2="${MARGIN.left}" y2="${py}" stroke="#444"/>`);
    parts.push(`<text x="${MARGIN.left - 8}" y="${py + 4}" text-anchor="end">${fmt(t)}</text>`);
    parts.push(`<line x1="${MARGIN.left}" y1="${py}" x2="${MARGIN.left + innerW}" y2="${py}" stroke="#eee"/>`);
  }
  parts.push(
    `<text x="${MARGIN.left + innerW / 2}" y="${height - 10}" text-anchor="middle">${escapeXml(spec.xLabel)}</text>`,
  );
  parts.push(
    `<text x="16" y="${MARGIN.top + innerH / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 16 ${MARGIN.top + innerH / 2})">${escapeXml(spec.yLabel)}</text>`,
  );

  // zero line when the y-range straddles it
  if (y0 < 0 && y1 > 0) {
    parts.push(
      `<line x1="${MARGIN.left}" y1="${sy(0)}" x2="${MARGIN.left + innerW}" y2="${sy(0)}" ` +
        `stroke="#999" stroke-dasharray="2,3"/>`,
    );
  }

  for (const s of spec.series) {
    if (s.points.length === 0) continue;
    const sorted = [...s.points].sort((a, b) => a[0] - b[0]);
    const path = sorted.map(([px, py]) => `${sx(px).toFixed(2)},${sy(py).toFixed(2)}`).join(" ");
    const dash = s.dashed ? ` stroke-dasharray="6,4"` : "";
    parts.push(
      `<polyline points="${path}" fill="none" stroke="${s.color}" stroke-width="1.8"${dash} class="series" data-label="${escapeXml(s.label)}"/>`,
    );
    if (s.showDots ?? sorted.length <= 40) {
      for (const [px, py] of sorted) {
        parts.push(`<circle cx="${sx(px).toFixed(2)}" cy="${sy(py).toFixed(2)}" r="2.4" fill="${s.color}"/>`);
      }
    }
  }

  for (const m of spec.markers ?? []) {
    const color = m.color ?? "#c03a2b";
    parts.push(
      `<circle cx="${sx(m.x).toFixed(2)}" cy="${sy(m.y).toFixed(2)}" r="5" fill="none" ` +
        `stroke="${color}" stroke-width="2" class="marker" data-x="${m.x}" data-y="${m.y}"/>`,
    );
    if (m.label) {
      parts.push(
        `<text x="${(sx(m.x) + 8).toFixed(2)}" y="${(sy(m.y) - 8).toFixed(2)}" fill="${color}">${escapeXml(m.label)}</text>`,
      );
    }
  }

  // legend
  let ly = MARGIN.top + 8;
  for (const s of spec.series) {
    const lx = MARGIN.left + innerW - 150;
    parts.push(`<line x1="${lx}" y1="${ly}" x2="${lx + 22}" y2="${ly}" stroke="${s.color}" stroke-width="2"${s.dashed ? ' stroke-dasharray="6,4"' : ""}/>`);
    parts.push(`<text x="${lx + 28}" y="${ly + 4}">${escapeXml(s.label)}</text>`);
    ly += 16;
  }

  let ay = height - 28;
  for (const note of spec.annotations ?? []) {
    parts.push(
      `<text x="${MARGIN.left}" y="${ay}" fill="#8a4a00" class="annotation">${escapeXml(note)}</text>`,
    );
    ay -= 14;
  }

  parts.push("</svg>");
  return parts.join("\n");
}
