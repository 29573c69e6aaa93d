/**
 * Hand-rolled deterministic SVG rendering: fixed canvas, fixed fonts,
 * no timestamps or randomness anywhere, so identical inputs produce
 * byte-identical files.
 */

export interface Series {
  label: string;
  /** (x, y) pairs; non-finite or non-positive-on-log points break the line. */
  points: [number, number][];
  dash?: string;
}

export interface Panel {
  title: string;
  xLabel: string;
  yLabel: string;
  xLog: boolean;
  yLog: boolean;
  series: Series[];
}

const WIDTH = 760;
const PANEL_HEIGHT = 420;
const MARGIN = { top: 48, right: 24, bottom: 58, left: 86 } as const;
const FONT = "font-family=\"Helvetica, Arial, sans-serif\"";
const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

export function fmt(value: number): string {
  if (value === 0) return "0";
  const abs = Math.abs(value);
  if (abs >= 0.001 && abs < 10000) {
    // Trim trailing zeros for stable short labels.
    return String(Number(value.toPrecision(6)));
  }
  const [mantissa, exponent] = value.toExponential(2).split("e");
  return `${Number(mantissa)}e${Number(exponent)}`;
}

function coord(value: number): string {
  return value.toFixed(2);
}

interface Scale {
  (value: number): number;
  ticks: number[];
}

function makeScale(
  lo: number,
  hi: number,
  rangeLo: number,
  rangeHi: number,
  log: boolean,
): Scale {
  if (log) {
    const la = Math.log10(lo);
    const lb = Math.log10(hi);
    const scale = ((value: number) =>
      rangeLo + ((Math.log10(value) - la) / (lb - la || 1)) * (rangeHi - rangeLo)) as Scale;
    const ticks: number[] = [];
    for (let e = Math.ceil(la - 1e-9); e <= Math.floor(lb + 1e-9); e++) {
      ticks.push(10 ** e);
    }
    scale.ticks = ticks.length >= 2 ? ticks : [lo, hi];
    return scale;
  }
  const scale = ((value: number) =>
    rangeLo + ((value - lo) / (hi - lo || 1)) * (rangeHi - rangeLo)) as Scale;
  const span = hi - lo || 1;
  const step = niceStep(span / 5);
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) {
    ticks.push(Number(t.toPrecision(12)));
  }
  scale.ticks = ticks;
  return scale;
}

function niceStep(raw: number): number {
  const power = 10 ** Math.floor(Math.log10(raw));
  const unit = raw / power;
  if (unit <= 1) return power;
  if (unit <= 2) return 2 * power;
  if (unit <= 5) return 5 * power;
  return 10 * power;
}

function dataExtent(
  series: Series[],
  axis: 0 | 1,
  log: boolean,
): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const s of series) {
    for (const p of s.points) {
      const v = p[axis];
      if (!Number.isFinite(v)) continue;
      if (log && v <= 0) continue;
      lo = Math.min(lo, v);
      hi = Math.max(hi, v);
    }
  }
  if (!Number.isFinite(lo) || !Number.isFinite(hi)) {
    return log ? [0.1, 1] : [0, 1];
  }
  if (lo === hi) {
    return log ? [lo / 10, hi * 10] : [lo - 1, hi + 1];
  }
  if (log) return [lo / 1.5, hi * 1.5];
  const pad = (hi - lo) * 0.05;
  return [lo - pad, hi + pad];
}

function renderPanel(panel: Panel, offsetY: number): string {
  const left = MARGIN.left;
  const right = WIDTH - MARGIN.right;
  const top = offsetY + MARGIN.top;
  const bottom = offsetY + PANEL_HEIGHT - MARGIN.bottom;
  const [xLo, xHi] = dataExtent(panel.series, 0, panel.xLog);
  const [yLo, yHi] = dataExtent(panel.series, 1, panel.yLog);
  const xScale = makeScale(xLo, xHi, left, right, panel.xLog);
  const yScale = makeScale(yLo, yHi, bottom, top, panel.yLog);

  const parts: string[] = [];
  parts.push(
    `<text x="${coord((left + right) / 2)}" y="${coord(offsetY + 24)}" ` +
      `${FONT} font-size="15" font-weight="bold" text-anchor="middle">` +
      `${escapeXml(panel.title)}</text>`,
  );
  // Frame
  parts.push(
    `<rect x="${coord(left)}" y="${coord(top)}" width="${coord(right - left)}" ` +
      `height="${coord(bottom - top)}" fill="none" stroke="#333" stroke-width="1"/>`,
  );
  // Grid and tick labels
  for (const t of xScale.ticks) {
    if (t < xLo - 1e-12 || t > xHi * (1 + 1e-12)) continue;
    const x = xScale(t);
    parts.push(
      `<line x1="${coord(x)}" y1="${coord(top)}" x2="${coord(x)}" ` +
        `y2="${coord(bottom)}" stroke="#ddd" stroke-width="0.5"/>`,
      `<text x="${coord(x)}" y="${coord(bottom + 18)}" ${FONT} font-size="11" ` +
        `text-anchor="middle">${fmt(t)}</text>`,
    );
  }
  for (const t of yScale.ticks) {
    const y = yScale(t);
    if (y > bottom + 0.5 || y < top - 0.5) continue;
    parts.push(
      `<line x1="${coord(left)}" y1="${coord(y)}" x2="${coord(right)}" ` +
        `y2="${coord(y)}" stroke="#ddd" stroke-width="0.5"/>`,
      `<text x="${coord(left - 6)}" y="${coord(y + 4)}" ${FONT} font-size="11" ` +
        `text-anchor="end">${fmt(t)}</text>`,
    );
  }
  // Axis labels
  parts.push(
    `<text x="${coord((left + right) / 2)}" y="${coord(bottom + 40)}" ${FONT} ` +
      `font-size="13" text-anchor="middle">${escapeXml(panel.xLabel)}</text>`,
    `<text x="${coord(left - 64)}" y="${coord((top + bottom) / 2)}" ${FONT} ` +
      `font-size="13" text-anchor="middle" ` +
      `transform="rotate(-90 ${coord(left - 64)} ${coord((top + bottom) / 2)})">` +
      `${escapeXml(panel.yLabel)}</text>`,
  );
  // Series
  panel.series.forEach((s, index) => {
    const color = PALETTE[index % PALETTE.length];
    const segments: string[][] = [[]];
    for (const [x, y] of s.points) {
      const drawable =
        Number.isFinite(x) && Number.isFinite(y) &&
        (!panel.xLog || x > 0) && (!panel.yLog || y > 0);
      if (!drawable) {
        if (segments[segments.length - 1].length > 0) segments.push([]);
        continue;
      }
      segments[segments.length - 1].push(
        `${coord(xScale(x))},${coord(yScale(y))}`,
      );
    }
    for (const seg of segments) {
      if (seg.length === 1) {
        const [x, y] = seg[0].split(",");
        parts.push(
          `<circle cx="${x}" cy="${y}" r="2.5" fill="${color}"/>`,
        );
      } else if (seg.length > 1) {
        parts.push(
          `<polyline points="${seg.join(" ")}" fill="none" stroke="${color}" ` +
            `stroke-width="1.8"${s.dash ? ` stroke-dasharray="${s.dash}"` : ""}/>`,
        );
      }
    }
    // Legend entry
    const lx = left + 12;
    const ly = top + 16 + index * 18;
    parts.push(
      `<line x1="${coord(lx)}" y1="${coord(ly - 4)}" x2="${coord(lx + 22)}" ` +
        `y2="${coord(ly - 4)}" stroke="${color}" stroke-width="2"` +
        `${s.dash ? ` stroke-dasharray="${s.dash}"` : ""}/>`,
      `<text x="${coord(lx + 28)}" y="${coord(ly)}" ${FONT} font-size="11">` +
        `${escapeXml(s.label)}</text>`,
    );
  });
  return parts.join("\n");
}

function escapeXml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

export function renderSvg(panels: Panel[], footer: string): string {
  const height = panels.length * PANEL_HEIGHT + 22;
  const body = panels
    .map((panel, index) => renderPanel(panel, index * PANEL_HEIGHT))
    .join("\n");
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${height}" ` +
      `viewBox="0 0 ${WIDTH} ${height}">`,
    `<rect width="${WIDTH}" height="${height}" fill="white"/>`,
    body,
    `<text x="${WIDTH - MARGIN.right}" y="${height - 8}" ${FONT} font-size="9" ` +
      `fill="#888" text-anchor="end">${escapeXml(footer)}</text>`,
    `</svg>`,
    ``,
  ].join("\n");
}
