/**
 * Figure layouts for the bundled scan presets.
 *
 * File names match the scan CLI's preset output (<preset>_<label>.csv in
 * the data directory).  Styling convention: driven-polarization amplitude
 * solid, phase dashed; orthogonal polarization dash-dot (amplitude) and
 * dotted (phase); panels stack vertically.
 */

import path from "node:path";
import { PlotSpec, PanelSpec, parsePlotSpec } from "./plotspec.js";

function curvesXY(csv: string): PanelSpec["curves"] {
  return [
    { csv, x: "omega", y: "s1_amp", label: "x amplitude", style: "solid", color: "#1f77b4" },
    { csv, x: "omega", y: "s1_phase", label: "x phase", style: "dashed", color: "#d62728" },
  ];
}

function curvesAll(csv: string): PanelSpec["curves"] {
  return [
    ...curvesXY(csv),
    { csv, x: "omega", y: "s2_amp", label: "y amplitude", style: "dashdot", color: "#2ca02c" },
    { csv, x: "omega", y: "s2_phase", label: "y phase", style: "dotted", color: "#9467bd" },
  ];
}

export function presetSpec(name: string, dataDir: string): PlotSpec {
  const file = (base: string) => path.join(dataDir, base);
  let raw: unknown;
  switch (name) {
    case "fig2":
      raw = {
        title: "Resonant two-level transmission (C=1)",
        panels: ["om0p3", "om0p5", "om1p0", "om2p0"].map((label) => ({
          title: `Omega_r = ${label.replace("om", "").replace("p", ".")}`,
          curves: curvesXY(file(`fig2_${label}.csv`)),
        })),
      };
      break;
    case "fig3":
      raw = {
        title: "Detuned two-level transmission vs cooperativity",
        panels: [1, 10, 100].map((c) => ({
          title: `C = ${c}`,
          curves: curvesXY(file(`fig3_C${c}.csv`)),
        })),
      };
      break;
    case "fig4":
      raw = {
        title: "Phase-quadrature noise: semiclassical vs quantum contributions",
        panels: [
          {
            curves: [
              { csv: file("fig4_C100.csv"), y: "s1_phase", label: "total", style: "solid", color: "#1f77b4" },
              { csv: file("fig4_C100.csv"), y: "s1_phase_semiclassical", label: "semiclassical", style: "dashed", color: "#d62728" },
              { csv: file("fig4_C100.csv"), y: "s1_phase_quantum", label: "quantum", style: "dotted", color: "#2ca02c" },
            ],
          },
        ],
      };
      break;
    case "fig5":
      raw = {
        title: "Open system Fg=1 -> Fe=0",
        panels: [
          {
            xScale: "log",
            curves: [
              { csv: file("fig5_C10.csv"), y: "s1_amp", label: "x amplitude", style: "dotted", color: "#1f77b4" },
              { csv: file("fig5_C10.csv"), y: "s1_phase", label: "x phase", style: "dashed", color: "#d62728" },
              { csv: file("fig5_C10.csv"), y: "s2_amp", label: "y (both quadratures)", style: "solid", color: "#2ca02c" },
            ],
          },
        ],
      };
      break;
    case "fig6":
      raw = {
        title: "Resonant Fg=1/2 -> Fe=1/2",
        panels: [
          {
            curves: [
              ...curvesXY(file("fig6_C10.csv")),
              { csv: file("fig6_C10.csv"), y: "s2_amp", label: "y amplitude", style: "dotted", color: "#2ca02c" },
            ],
          },
        ],
      };
      break;
    case "fig7":
      raw = {
        title: "Detuned Fg=1/2 -> Fe=1/2 (polarization self-rotation)",
        panels: [
          {
            xScale: "log",
            curves: curvesAll(file("fig7_C10.csv")),
            inset: { xRange: [0, 2] },
          },
        ],
      };
      break;
    case "fig8":
      raw = {
        title: "Fg=1 -> Fe=2 at high intensity",
        panels: [
          {
            title: "atoms at rest",
            xScale: "log",
            curves: curvesAll(file("fig8_rest.csv")),
            inset: { xRange: [0, 2] },
          },
          {
            title: "thermal vapor (Doppler FWHM 90)",
            xScale: "log",
            curves: curvesAll(file("fig8_doppler.csv")),
            inset: { xRange: [0, 2] },
          },
        ],
      };
      break;
    default:
      throw new Error(
        `unknown preset "${name}" (available: fig2, fig3, fig4, fig5, fig6, fig7, fig8)`,
      );
  }
  return parsePlotSpec(raw);
}

export const PRESET_NAMES = ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"];
