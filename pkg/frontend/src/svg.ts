/**
 * Deterministic SVG line-chart renderer for noise spectra.
 *
 * No DOM and no randomness: identical inputs produce identical bytes.
 * Conventions follow the benchmark figures: the shot-noise level is drawn
 * at 1, amplitude quadratures are solid, phase quadratures dashed, and the
 * orthogonal polarization uses dash-dot/dotted strokes.  NaN samples split
 * a curve into separate segments (failed grid points appear as gaps).
 */

import { CsvTable, column } from "./csv.js";
import { CurveSpec, PanelSpec, PlotSpec } from "./plotspec.js";

const MARGIN = { left: 60, right: 18, top: 30, bottom: 44 };
const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const DASH: Record<string, string> = {
  solid: "",
  dashed: "9 5",
  dotted: "2 4",
  dashdot: "11 4 2 4",
};

function fmt(value: number): string {
  if (!Number.isFinite(value)) return "0";
  const rounded = Number(value.toFixed(3));
  return Object.is(rounded, -0) ? "0" : String(rounded);
}

function fmtTick(value: number): string {
  const abs = Math.abs(value);
  if (value !== 0 && (abs >= 1e4 || abs < 1e-3)) {
    return value.toExponential(0).replace("+", "");
  }
  return String(Number(value.toPrecision(6)));
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function niceStep(span: number, target: number): number {
  const raw = span / target;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  for (const mult of [1, 2, 2.5, 5, 10]) {
    if (mag * mult >= raw) return mag * mult;
  }
  return mag * 10;
}

function linearTicks(lo: number, hi: number, target = 5): number[] {
  const step = niceStep(hi - lo, target);
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = first; v <= hi + 1e-9 * step; v += step) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  const dLo = Math.ceil(Math.log10(lo) - 1e-9);
  const dHi = Math.floor(Math.log10(hi) + 1e-9);
  for (let d = dLo; d <= dHi; d++) ticks.push(Math.pow(10, d));
  return ticks;
}

interface Series {
  curve: CurveSpec;
  xs: number[];
  ys: number[];
  color: string;
}

interface Box {
  x0: number;
  y0: number;
  width: number;
  height: number;
}

function dataRange(
  series: Series[],
  xRange: [number, number] | undefined,
  logX: boolean,
): { x: [number, number]; y: [number, number] } {
  let xLo = Infinity, xHi = -Infinity, yLo = Infinity, yHi = -Infinity;
  for (const s of series) {
    for (let i = 0; i < s.xs.length; i++) {
      const x = s.xs[i];
      const y = s.ys[i];
      if (!Number.isFinite(x) || (logX && x <= 0)) continue;
      if (xRange && (x < xRange[0] || x > xRange[1])) continue;
      xLo = Math.min(xLo, x);
      xHi = Math.max(xHi, x);
      if (Number.isFinite(y)) {
        yLo = Math.min(yLo, y);
        yHi = Math.max(yHi, y);
      }
    }
  }
  if (!Number.isFinite(xLo) || xLo === xHi) {
    xLo = xRange ? xRange[0] : 0;
    xHi = xRange ? xRange[1] : 1;
    if (xLo === xHi) xHi = xLo + 1;
  }
  if (!Number.isFinite(yLo)) {
    yLo = 0;
    yHi = 1;
  }
  if (yLo === yHi) {
    yLo -= 0.5;
    yHi += 0.5;
  }
  const pad = 0.05 * (yHi - yLo);
  return { x: xRange ?? [xLo, xHi], y: [yLo - pad, yHi + pad] };
}

function makeScales(
  box: Box,
  xRange: [number, number],
  yRange: [number, number],
  logX: boolean,
) {
  const xl = logX ? Math.log10(xRange[0]) : xRange[0];
  const xh = logX ? Math.log10(xRange[1]) : xRange[1];
  const sx = (v: number) => {
    const t = logX ? Math.log10(v) : v;
    return box.x0 + ((t - xl) / (xh - xl)) * box.width;
  };
  const sy = (v: number) =>
    box.y0 + box.height - ((v - yRange[0]) / (yRange[1] - yRange[0])) * box.height;
  return { sx, sy };
}

/**
 * Split a sampled curve into finite segments (NaN opens a gap), keeping
 * only points near the x window; the clip path trims the boundary.
 */
function segments(
  xs: number[],
  ys: number[],
  logX: boolean,
  xRange: [number, number],
): Array<Array<[number, number]>> {
  const margin = 0.05 * (xRange[1] - xRange[0]);
  const lo = xRange[0] - margin;
  const hi = xRange[1] + margin;
  const out: Array<Array<[number, number]>> = [];
  let run: Array<[number, number]> = [];
  for (let i = 0; i < xs.length; i++) {
    const ok =
      Number.isFinite(xs[i]) &&
      Number.isFinite(ys[i]) &&
      (!logX || xs[i] > 0) &&
      xs[i] >= lo &&
      xs[i] <= hi;
    if (ok) {
      run.push([xs[i], ys[i]]);
    } else if (run.length > 0) {
      out.push(run);
      run = [];
    }
  }
  if (run.length > 0) out.push(run);
  return out;
}

function renderCurves(
  series: Series[],
  box: Box,
  xRange: [number, number],
  yRange: [number, number],
  logX: boolean,
  clipId: string,
): string {
  const { sx, sy } = makeScales(box, xRange, yRange, logX);
  const parts: string[] = [];
  for (const s of series) {
    const dash = DASH[s.curve.style];
    for (const seg of segments(s.xs, s.ys, logX, xRange)) {
      if (seg.length < 2) continue;
      const d = seg
        .map(([x, y], i) => `${i === 0 ? "M" : "L"}${fmt(sx(x))} ${fmt(sy(y))}`)
        .join("");
      parts.push(
        `<path d="${d}" fill="none" stroke="${s.color}" stroke-width="1.4"` +
          (dash ? ` stroke-dasharray="${dash}"` : "") +
          ` clip-path="url(#${clipId})"/>`,
      );
    }
  }
  return parts.join("\n");
}

function renderAxes(
  box: Box,
  xRange: [number, number],
  yRange: [number, number],
  logX: boolean,
  fontSize: number,
  withLabels: boolean,
): string {
  const { sx, sy } = makeScales(box, xRange, yRange, logX);
  const parts: string[] = [];
  parts.push(
    `<rect x="${fmt(box.x0)}" y="${fmt(box.y0)}" width="${fmt(box.width)}" height="${fmt(
      box.height,
    )}" fill="white" stroke="#444" stroke-width="0.8"/>`,
  );
  const xTicks = logX ? logTicks(xRange[0], xRange[1]) : linearTicks(xRange[0], xRange[1]);
  for (const t of xTicks) {
    const px = sx(t);
    parts.push(
      `<line x1="${fmt(px)}" y1="${fmt(box.y0 + box.height)}" x2="${fmt(px)}" y2="${fmt(
        box.y0 + box.height - 4,
      )}" stroke="#444" stroke-width="0.8"/>`,
    );
    if (withLabels) {
      parts.push(
        `<text x="${fmt(px)}" y="${fmt(box.y0 + box.height + fontSize + 4)}" ` +
          `text-anchor="middle" font-size="${fontSize}">${fmtTick(t)}</text>`,
      );
    }
  }
  for (const t of linearTicks(yRange[0], yRange[1], 4)) {
    const py = sy(t);
    parts.push(
      `<line x1="${fmt(box.x0)}" y1="${fmt(py)}" x2="${fmt(box.x0 + 4)}" y2="${fmt(
        py,
      )}" stroke="#444" stroke-width="0.8"/>`,
    );
    if (withLabels) {
      parts.push(
        `<text x="${fmt(box.x0 - 6)}" y="${fmt(py + fontSize / 3)}" text-anchor="end" ` +
          `font-size="${fontSize}">${fmtTick(t)}</text>`,
      );
    }
  }
  // Shot-noise reference at 1.
  if (yRange[0] < 1 && 1 < yRange[1]) {
    parts.push(
      `<line x1="${fmt(box.x0)}" y1="${fmt(sy(1))}" x2="${fmt(box.x0 + box.width)}" ` +
        `y2="${fmt(sy(1))}" stroke="#999" stroke-width="0.7" stroke-dasharray="3 3"/>`,
    );
  }
  return parts.join("\n");
}

let clipCounter = 0;

function renderPanel(
  panel: PanelSpec,
  series: Series[],
  box: Box,
  xLabel: string,
): string {
  const logX = panel.xScale === "log";
  const range = dataRange(series, panel.xRange, logX);
  const yRange = panel.yRange ?? range.y;
  const xRange = range.x;
  const clipId = `clip${clipCounter++}`;
  const parts: string[] = [];
  parts.push(
    `<clipPath id="${clipId}"><rect x="${fmt(box.x0)}" y="${fmt(box.y0)}" width="${fmt(
      box.width,
    )}" height="${fmt(box.height)}"/></clipPath>`,
  );
  parts.push(renderAxes(box, xRange, yRange, logX, 11, true));
  parts.push(renderCurves(series, box, xRange, yRange, logX, clipId));
  if (panel.title) {
    parts.push(
      `<text x="${fmt(box.x0 + 8)}" y="${fmt(box.y0 + 16)}" font-size="12" ` +
        `font-weight="bold">${escapeXml(panel.title)}</text>`,
    );
  }
  parts.push(
    `<text x="${fmt(box.x0 + box.width / 2)}" y="${fmt(
      box.y0 + box.height + 34,
    )}" text-anchor="middle" font-size="11">${escapeXml(xLabel)}</text>`,
  );
  // Legend, top right.
  let ly = box.y0 + 14;
  for (const s of series) {
    const label = s.curve.label ?? s.curve.y;
    const lx = box.x0 + box.width - 150;
    const dash = DASH[s.curve.style];
    parts.push(
      `<line x1="${fmt(lx)}" y1="${fmt(ly - 3)}" x2="${fmt(lx + 26)}" y2="${fmt(ly - 3)}" ` +
        `stroke="${s.color}" stroke-width="1.4"` +
        (dash ? ` stroke-dasharray="${dash}"` : "") +
        `/>`,
    );
    parts.push(
      `<text x="${fmt(lx + 32)}" y="${fmt(ly)}" font-size="10">${escapeXml(label)}</text>`,
    );
    ly += 13;
  }
  // Inset: zoomed replica, drawn inside the panel.
  if (panel.inset) {
    const ibox: Box = {
      x0: box.x0 + 0.56 * box.width,
      y0: box.y0 + 0.52 * box.height,
      width: 0.4 * box.width,
      height: 0.4 * box.height,
    };
    const insetLog = false; // zoomed low-frequency window reads best linearly
    const irange = dataRange(series, panel.inset.xRange, insetLog);
    const iy = panel.inset.yRange ?? irange.y;
    const iclip = `clip${clipCounter++}`;
    parts.push(
      `<clipPath id="${iclip}"><rect x="${fmt(ibox.x0)}" y="${fmt(ibox.y0)}" width="${fmt(
        ibox.width,
      )}" height="${fmt(ibox.height)}"/></clipPath>`,
    );
    parts.push(
      `<rect x="${fmt(ibox.x0 - 2)}" y="${fmt(ibox.y0 - 2)}" width="${fmt(
        ibox.width + 4,
      )}" height="${fmt(ibox.height + 4)}" fill="white" stroke="none"/>`,
    );
    parts.push(renderAxes(ibox, panel.inset.xRange, iy, insetLog, 8, true));
    parts.push(renderCurves(series, ibox, panel.inset.xRange, iy, insetLog, iclip));
  }
  return parts.join("\n");
}

export function renderSvg(
  spec: PlotSpec,
  tables: Map<string, CsvTable>,
): string {
  clipCounter = 0;
  const width = spec.width;
  const panelH = spec.panelHeight;
  const titlePad = spec.title ? 24 : 0;
  const height = titlePad + spec.panels.length * panelH;
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  if (spec.title) {
    parts.push(
      `<text x="${fmt(width / 2)}" y="17" text-anchor="middle" font-size="14" ` +
        `font-weight="bold">${escapeXml(spec.title)}</text>`,
    );
  }
  spec.panels.forEach((panel, i) => {
    const series: Series[] = panel.curves.map((curve, ci) => {
      const table = tables.get(curve.csv);
      if (table === undefined) {
        throw new Error(`internal: table ${curve.csv} not loaded`);
      }
      return {
        curve,
        xs: column(table, curve.x),
        ys: column(table, curve.y),
        color: curve.color ?? PALETTE[ci % PALETTE.length],
      };
    });
    const box: Box = {
      x0: MARGIN.left,
      y0: titlePad + i * panelH + MARGIN.top,
      width: width - MARGIN.left - MARGIN.right,
      height: panelH - MARGIN.top - MARGIN.bottom,
    };
    parts.push(renderPanel(panel, series, box, "noise frequency (units of Gamma)"));
  });
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
