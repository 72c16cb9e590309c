/**
 * Multi-panel log-scale SVG figure for a sweep dataset.
 *
 * One panel per source group: Monte Carlo estimates as circles, the analytic
 * upper bound as a solid line, the lower bound as a dotted line, the
 * conventional round-robin baseline as dashed crosses, and below-resolution
 * rows as one-sided arrows hanging from the interval's upper edge.  Each
 * panel is annotated with the least-squares slope of ln(p) over the axis.
 */

import { SweepRow, byGroup } from "./schema.js";
import { SlopeFit, fitLogSlope } from "./fit.js";

export const FIGURE_KINDS = {
  "violation-vs-n": "sources per group",
  "violation-vs-period": "fundamental arrival period",
  "violation-vs-service": "mean transmission time",
} as const;

export type FigureKind = keyof typeof FIGURE_KINDS;

const KIND_AXES: Record<FigureKind, string> = {
  "violation-vs-n": "n",
  "violation-vs-period": "arrival_period",
  "violation-vs-service": "mean_service",
};

export class KindMismatch extends Error {}

export interface PanelSummary {
  g: number;
  slope: number | null;
  points: number;
}

export interface Figure {
  svg: string;
  panels: PanelSummary[];
}

const PANEL_W = 340;
const PANEL_H = 320;
const MARGIN = { left: 64, right: 16, top: 40, bottom: 48 };

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function fmtLog(exp10: number): string {
  return `1e${exp10}`;
}

export function renderFigure(
  rows: SweepRow[],
  kind: FigureKind,
  title: string,
  fitRange?: readonly [number, number],
): Figure {
  const wantAxis = KIND_AXES[kind];
  if (!rows.every((r) => r.axis === wantAxis)) {
    const seen = [...new Set(rows.map((r) => r.axis))].join(",");
    throw new KindMismatch(`figure kind ${kind} expects axis ${wantAxis}, CSV has ${seen}`);
  }
  const groups = byGroup(rows);
  const panels: PanelSummary[] = [];
  const width = MARGIN.left + (PANEL_W + MARGIN.right) * groups.size;
  const height = PANEL_H + MARGIN.top + MARGIN.bottom;
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="11">`,
  );
  parts.push(`<title>${esc(title)}</title>`);
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(
    `<text x="${width / 2}" y="18" text-anchor="middle" font-size="14">${esc(title)}</text>`,
  );

  // Shared scales across panels.
  const axisVals = rows.map((r) => r.axisValue);
  const xMin = Math.min(...axisVals);
  const xMax = Math.max(...axisVals);
  const probs: number[] = [];
  for (const r of rows) {
    for (const v of [r.pHat, r.ubProb, r.lbProb, r.rrPHat, r.ciHigh]) {
      if (v !== null && v > 0) probs.push(v);
    }
  }
  const eMin = Math.min(-1, Math.floor(Math.log10(Math.min(...probs, 1))));
  const eMax = 0;

  let panelIdx = 0;
  for (const [g, panelRows] of groups) {
    const x0 = MARGIN.left + panelIdx * (PANEL_W + MARGIN.right);
    const y0 = MARGIN.top;
    const toX = (v: number) =>
      x0 + ((v - xMin) / (xMax - xMin || 1)) * (PANEL_W - 20) + 10;
    const toY = (p: number) => {
      const e = Math.log10(p);
      return y0 + ((eMax - e) / (eMax - eMin)) * (PANEL_H - 20) + 10;
    };
    const clampY = (p: number) => toY(Math.max(p, Math.pow(10, eMin)));

    const axis = panelRows.map((r) => r.axisValue);
    const fit: SlopeFit = fitLogSlope(axis, panelRows.map((r) => r.pHat), fitRange);
    panels.push({ g, slope: fit.slope, points: fit.points });

    parts.push(`<g class="panel" data-group="${g}" data-yscale="log">`);
    parts.push(
      `<rect x="${x0}" y="${y0}" width="${PANEL_W}" height="${PANEL_H}" ` +
      `fill="none" stroke="#444"/>`,
    );
    // log-decade gridlines and tick labels
    for (let e = eMax; e >= eMin; e--) {
      const y = toY(Math.pow(10, e));
      parts.push(
        `<line x1="${x0}" y1="${y}" x2="${x0 + PANEL_W}" y2="${y}" ` +
        `stroke="#ddd" stroke-width="0.6"/>`,
      );
      if (panelIdx === 0) {
        parts.push(
          `<text class="ytick" x="${x0 - 6}" y="${y + 3}" text-anchor="end">` +
          `${fmtLog(e)}</text>`,
        );
      }
    }
    // x ticks at data points
    for (const v of [...new Set(axis)]) {
      parts.push(
        `<text x="${toX(v)}" y="${y0 + PANEL_H + 14}" text-anchor="middle">` +
        `${v}</text>`,
      );
    }

    const polyline = (
      pts: Array<[number, number | null]>, style: string, cls: string,
    ) => {
      const coords = pts
        .filter((pt): pt is [number, number] => pt[1] !== null && pt[1] > 0)
        .map(([xv, pv]) => `${toX(xv).toFixed(2)},${clampY(pv).toFixed(2)}`);
      if (coords.length >= 2) {
        parts.push(
          `<polyline class="${cls}" points="${coords.join(" ")}" fill="none" ${style}/>`,
        );
      }
    };
    polyline(panelRows.map((r) => [r.axisValue, r.ubProb]),
             'stroke="#b22" stroke-width="1.4"', "ub");
    polyline(panelRows.map((r) => [r.axisValue, r.lbProb]),
             'stroke="#271" stroke-width="1.2" stroke-dasharray="2,3"', "lb");
    polyline(panelRows.map((r) => [r.axisValue, r.rrPHat]),
             'stroke="#888" stroke-width="1.1" stroke-dasharray="6,3"', "rr");

    for (const r of panelRows) {
      const cx = toX(r.axisValue);
      if (r.flags.includes("below_resolution") && r.ciHigh !== null && r.ciHigh > 0) {
        // one-sided arrow from the resolution edge downward
        const yTop = clampY(r.ciHigh);
        parts.push(
          `<g class="below-resolution">` +
          `<line x1="${cx}" y1="${yTop}" x2="${cx}" y2="${yTop + 16}" stroke="#15c"/>` +
          `<path d="M ${cx - 3.5} ${yTop + 12} L ${cx} ${yTop + 18} L ${cx + 3.5} ${yTop + 12} Z" fill="#15c"/>` +
          `</g>`,
        );
        continue;
      }
      if (r.pHat !== null && r.pHat > 0) {
        parts.push(
          `<circle class="mc" cx="${cx}" cy="${clampY(r.pHat)}" r="3.4" ` +
          `fill="#15c"/>`,
        );
        if (r.ciLow !== null && r.ciHigh !== null && r.ciLow > 0) {
          parts.push(
            `<line class="ci" x1="${cx}" y1="${clampY(r.ciLow)}" x2="${cx}" ` +
            `y2="${clampY(r.ciHigh)}" stroke="#15c" stroke-width="0.8"/>`,
          );
        }
      }
    }

    const slopeText = fit.slope === null
      ? "slope: n/a"
      : `slope: ${fit.slope.toFixed(6)}`;
    parts.push(
      `<text class="slope" x="${x0 + 10}" y="${y0 + 16}" data-slope="` +
      `${fit.slope === null ? "" : String(fit.slope)}">${slopeText}</text>`,
    );
    parts.push(
      `<text x="${x0 + PANEL_W / 2}" y="${y0 + PANEL_H + 32}" text-anchor="middle">` +
      `group ${g} - ${esc(FIGURE_KINDS[kind])}</text>`,
    );
    parts.push("</g>");
    panelIdx += 1;
  }
  parts.push("</svg>");
  return { svg: parts.join("\n"), panels };
}
