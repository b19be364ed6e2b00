import { z } from "zod";

export const LineStyle = z.enum(["solid", "dashed", "dotted", "dashdot"]);
export type LineStyle = z.infer<typeof LineStyle>;

export const CurveSpec = z.object({
  /** CSV file the curve reads from. */
  csv: z.string(),
  /** Column for the horizontal axis (noise frequency). */
  x: z.string().default("omega"),
  /** Column with the noise power. */
  y: z.string(),
  label: z.string().optional(),
  style: LineStyle.default("solid"),
  color: z.string().optional(),
});
export type CurveSpec = z.infer<typeof CurveSpec>;

export const Range = z.tuple([z.number(), z.number()]);

export const PanelSpec = z.object({
  title: z.string().optional(),
  curves: z.array(CurveSpec).min(1),
  xRange: Range.optional(),
  yRange: Range.optional(),
  xScale: z.enum(["linear", "log"]).default("linear"),
  /** Zoomed low-frequency replica drawn inside the panel. */
  inset: z
    .object({ xRange: Range, yRange: Range.optional() })
    .optional(),
});
export type PanelSpec = z.infer<typeof PanelSpec>;

export const PlotSpec = z.object({
  title: z.string().optional(),
  panels: z.array(PanelSpec).min(1),
  width: z.number().int().positive().default(760),
  panelHeight: z.number().int().positive().default(300),
  output: z.string().optional(),
});
export type PlotSpec = z.infer<typeof PlotSpec>;

export function parsePlotSpec(raw: unknown): PlotSpec {
  const result = PlotSpec.safeParse(raw);
  if (!result.success) {
    const issues = result.error.issues
      .map((i) => `${i.path.join(".") || "(root)"}: ${i.message}`)
      .join("; ");
    throw new Error(`invalid plot spec: ${issues}`);
  }
  return result.data;
}
