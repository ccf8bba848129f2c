/**
 * Deterministic SVG chart builder: fixed canvas, fixed fonts, no timestamps,
 * so identical inputs render byte-identical files.
 */

export interface PointSeries {
  kind: "points";
  x: number[];
  y: number[];
  /** half-length of the vertical error bar (already scaled, e.g. 2 stderr) */
  yerr?: number[];
  color: string;
  label: string;
}

export interface LineSeries {
  kind: "line";
  x: number[];
  y: number[];
  color: string;
  label: string;
  dash?: string;
}

export type Series = PointSeries | LineSeries;

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  /** extra text lines drawn under the legend (fit parameters etc.) */
  annotations?: string[];
  yZero?: boolean;
  logY?: boolean;
}

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { top: 48, right: 24, bottom: 56, left: 72 };
const FONT = "font-family=\"Helvetica, Arial, sans-serif\"";

const fmt = (v: number): string => {
  if (!Number.isFinite(v)) return "0";
  const s = v.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
};

function niceTicks(lo: number, hi: number, n = 6): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step0 = span / n;
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  const candidates = [1, 2, 2.5, 5, 10].map((m) => m * mag);
  const step = candidates.find((c) => span / c <= n) ?? 10 * mag;
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let t = first; t <= hi + 1e-12 * span; t += step) {
    ticks.push(Math.abs(t) < 1e-12 * span ? 0 : t);
  }
  return ticks;
}

function tickLabel(t: number): string {
  if (t === 0) return "0";
  const a = Math.abs(t);
  if (a >= 1000 || a < 0.01) return t.toExponential(1);
  return parseFloat(t.toPrecision(4)).toString();
}

export function renderChart(spec: ChartSpec): string {
  const xs = spec.series.flatMap((s) => s.x).filter(Number.isFinite);
  const ysAll = spec.series.flatMap((s) =>
    s.kind === "points" && s.yerr
      ? s.y.flatMap((v, i) => [v - (s.yerr![i] ?? 0), v + (s.yerr![i] ?? 0)])
      : s.y,
  ).filter(Number.isFinite);
  let xLo = Math.min(...xs);
  let xHi = Math.max(...xs);
  let yLo = spec.yZero ? Math.min(0, Math.min(...ysAll)) : Math.min(...ysAll);
  let yHi = Math.max(...ysAll);
  if (xHi === xLo) { xHi += 1; xLo -= 1; }
  if (yHi === yLo) { yHi += 1; yLo -= 1; }
  const xPad = 0.04 * (xHi - xLo);
  const yPad = 0.08 * (yHi - yLo);
  xLo -= xPad; xHi += xPad;
  if (!spec.yZero || yLo < 0) yLo -= yPad;
  yHi += yPad;

  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const X = (v: number) => MARGIN.left + ((v - xLo) / (xHi - xLo)) * plotW;
  const Y = (v: number) => MARGIN.top + plotH - ((v - yLo) / (yHi - yLo)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
    `<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-size="16" ${FONT}>${escape(spec.title)}</text>`,
  );

  // axes, grid, ticks
  for (const t of niceTicks(xLo + xPad, xHi - xPad)) {
    const px = fmt(X(t));
    parts.push(
      `<line x1="${px}" y1="${fmt(MARGIN.top)}" x2="${px}" y2="${fmt(MARGIN.top + plotH)}" stroke="#dddddd" stroke-width="1"/>`,
      `<text x="${px}" y="${fmt(MARGIN.top + plotH + 18)}" text-anchor="middle" font-size="11" ${FONT}>${tickLabel(t)}</text>`,
    );
  }
  for (const t of niceTicks(yLo, yHi)) {
    const py = fmt(Y(t));
    parts.push(
      `<line x1="${fmt(MARGIN.left)}" y1="${py}" x2="${fmt(MARGIN.left + plotW)}" y2="${py}" stroke="#dddddd" stroke-width="1"/>`,
      `<text x="${fmt(MARGIN.left - 8)}" y="${py}" text-anchor="end" dominant-baseline="middle" font-size="11" ${FONT}>${tickLabel(t)}</text>`,
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#333333"/>`,
    `<text x="${MARGIN.left + plotW / 2}" y="${HEIGHT - 14}" text-anchor="middle" font-size="13" ${FONT}>${escape(spec.xLabel)}</text>`,
    `<text x="20" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-size="13" ${FONT} transform="rotate(-90 20 ${MARGIN.top + plotH / 2})">${escape(spec.yLabel)}</text>`,
  );

  for (const s of spec.series) {
    if (s.kind === "line") {
      const pts = s.x
        .map((v, i) => ({ x: v, y: s.y[i]! }))
        .filter((p) => Number.isFinite(p.x) && Number.isFinite(p.y))
        .map((p) => `${fmt(X(p.x))},${fmt(Y(p.y))}`)
        .join(" ");
      const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
      parts.push(`<polyline points="${pts}" fill="none" stroke="${s.color}" stroke-width="1.8"${dash}/>`);
    } else {
      for (let i = 0; i < s.x.length; i++) {
        const vx = s.x[i]!;
        const vy = s.y[i]!;
        if (!Number.isFinite(vx) || !Number.isFinite(vy)) continue;
        const px = fmt(X(vx));
        if (s.yerr) {
          const e = s.yerr[i] ?? 0;
          parts.push(
            `<line x1="${px}" y1="${fmt(Y(vy - e))}" x2="${px}" y2="${fmt(Y(vy + e))}" stroke="${s.color}" stroke-width="1.2"/>`,
            `<line x1="${fmt(X(vx) - 3)}" y1="${fmt(Y(vy - e))}" x2="${fmt(X(vx) + 3)}" y2="${fmt(Y(vy - e))}" stroke="${s.color}" stroke-width="1.2"/>`,
            `<line x1="${fmt(X(vx) - 3)}" y1="${fmt(Y(vy + e))}" x2="${fmt(X(vx) + 3)}" y2="${fmt(Y(vy + e))}" stroke="${s.color}" stroke-width="1.2"/>`,
          );
        }
        parts.push(`<circle cx="${px}" cy="${fmt(Y(vy))}" r="3.2" fill="${s.color}"/>`);
      }
    }
  }

  // legend and annotations
  let ly = MARGIN.top + 14;
  for (const s of spec.series) {
    const lx = MARGIN.left + plotW - 210;
    if (s.kind === "line") {
      parts.push(`<line x1="${lx}" y1="${ly - 4}" x2="${lx + 22}" y2="${ly - 4}" stroke="${s.color}" stroke-width="1.8"${s.dash ? ` stroke-dasharray="${s.dash}"` : ""}/>`);
    } else {
      parts.push(`<circle cx="${lx + 11}" cy="${ly - 4}" r="3.2" fill="${s.color}"/>`);
    }
    parts.push(`<text x="${lx + 28}" y="${ly}" font-size="12" ${FONT}>${escape(s.label)}</text>`);
    ly += 17;
  }
  for (const note of spec.annotations ?? []) {
    parts.push(`<text x="${MARGIN.left + plotW - 210}" y="${ly}" font-size="11" fill="#444444" ${FONT}>${escape(note)}</text>`);
    ly += 15;
  }

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

function escape(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}
