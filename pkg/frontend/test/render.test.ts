import fs from "node:fs";
import os from "node:os";
import path from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { MissingColumnError, loadCsv } from "../src/csv.js";
import { parsePlotSpec } from "../src/plotspec.js";
import { PRESET_NAMES, presetSpec } from "../src/presets.js";
import { renderToFile } from "../src/render.js";
import { main } from "../src/cli.js";

const DATA_DIR = path.join(__dirname, "..", "testdata");

let tmpDir: string;

beforeAll(() => {
  tmpDir = fs.mkdtempSync(path.join(os.tmpdir(), "plots-"));
});

afterAll(() => {
  fs.rmSync(tmpDir, { recursive: true, force: true });
});

function writeCsv(name: string, text: string): string {
  const p = path.join(tmpDir, name);
  fs.writeFileSync(p, text);
  return p;
}

describe("preset rendering from generated scan output", () => {
  for (const name of PRESET_NAMES) {
    it(`renders ${name}`, () => {
      const out = path.join(tmpDir, `${name}.svg`);
      renderToFile(presetSpec(name, DATA_DIR), out);
      const svg = fs.readFileSync(out, "utf8");
      expect(svg.startsWith("<svg")).toBe(true);
      expect(svg).toContain("</svg>");
      expect(svg).toContain("<path");
      expect(svg).toContain("stroke-dasharray"); // dashed phase styling present
    });
  }

  it("fig3 stacks three panels with solid amplitude and dashed phase", () => {
    const out = path.join(tmpDir, "fig3-panels.svg");
    renderToFile(presetSpec("fig3", DATA_DIR), out);
    const svg = fs.readFileSync(out, "utf8");
    expect(svg.match(/C = 1\b/)).toBeTruthy();
    expect(svg).toContain("C = 10");
    expect(svg).toContain("C = 100");
    // one clipPath per panel
    expect((svg.match(/<clipPath/g) ?? []).length).toBe(3);
  });

  it("fig7 includes the zoomed low-frequency inset", () => {
    const out = path.join(tmpDir, "fig7-inset.svg");
    renderToFile(presetSpec("fig7", DATA_DIR), out);
    const svg = fs.readFileSync(out, "utf8");
    // panel + inset each carry a clip path
    expect((svg.match(/<clipPath/g) ?? []).length).toBe(2);
  });

  it("renders are deterministic and leave inputs untouched", () => {
    const input = path.join(DATA_DIR, "fig6_C10.csv");
    const before = fs.readFileSync(input);
    const a = path.join(tmpDir, "det-a.svg");
    const b = path.join(tmpDir, "det-b.svg");
    renderToFile(presetSpec("fig6", DATA_DIR), a);
    renderToFile(presetSpec("fig6", DATA_DIR), b);
    expect(fs.readFileSync(a, "utf8")).toEqual(fs.readFileSync(b, "utf8"));
    expect(fs.readFileSync(input).equals(before)).toBe(true);
  });
});

describe("error handling", () => {
  it("names a missing column", () => {
    const csv = writeCsv("missing.csv", "omega,s1_amp\n0,1\n1,0.9\n");
    const spec = parsePlotSpec({
      panels: [{ curves: [{ csv, y: "s1_phase" }] }],
    });
    expect(() => renderToFile(spec, path.join(tmpDir, "x.svg"))).toThrowError(
      MissingColumnError,
    );
    expect(() => renderToFile(spec, path.join(tmpDir, "x.svg"))).toThrowError(
      /s1_phase/,
    );
  });

  it("rejects an empty CSV", () => {
    const csv = writeCsv("empty.csv", "");
    expect(() => loadCsv(csv)).toThrowError(/empty CSV/);
  });

  it("rejects a header-only CSV", () => {
    const csv = writeCsv("header-only.csv", "omega,s1_amp\n");
    expect(() => loadCsv(csv)).toThrowError(/no data rows/);
  });

  it("rejects an invalid plot spec with field paths", () => {
    expect(() => parsePlotSpec({ panels: [] })).toThrowError(/panels/);
  });
});

describe("NaN rows", () => {
  it("become gaps, not crashes", () => {
    const csv = writeCsv(
      "gaps.csv",
      [
        "omega,s1_amp",
        "0,1.1",
        "1,1.05",
        "2,nan",
        "3,nan",
        "4,0.95",
        "5,0.97",
        "",
      ].join("\n"),
    );
    const spec = parsePlotSpec({
      panels: [{ curves: [{ csv, y: "s1_amp", color: "#123456" }] }],
    });
    const out = path.join(tmpDir, "gaps.svg");
    renderToFile(spec, out);
    const svg = fs.readFileSync(out, "utf8");
    const curveSegments = (svg.match(/stroke="#123456"/g) ?? []).length;
    // two finite runs -> two path segments (legend swatch adds one more line)
    expect(curveSegments).toBe(3);
  });

  it("generated Doppler data parses with finite and NaN handling intact", () => {
    const table = loadCsv(path.join(DATA_DIR, "fig8_doppler.csv"));
    expect(table.columns).toContain("s1_phase");
    expect(table.rowCount).toBeGreaterThan(50);
  });
});

describe("cli", () => {
  it("renders a preset", async () => {
    const out = path.join(tmpDir, "cli-fig2.svg");
    const code = await main(["--preset", "fig2", "--data", DATA_DIR, "--out", out]);
    expect(code).toBe(0);
    expect(fs.existsSync(out)).toBe(true);
  });

  it("renders from a spec file", async () => {
    const specPath = path.join(tmpDir, "custom.json");
    fs.writeFileSync(
      specPath,
      JSON.stringify({
        title: "custom",
        panels: [
          {
            curves: [
              { csv: path.join(DATA_DIR, "fig3_C100.csv"), y: "duan_sum", label: "Duan sum" },
            ],
          },
        ],
      }),
    );
    const out = path.join(tmpDir, "custom.svg");
    const code = await main(["--spec", specPath, "--out", out]);
    expect(code).toBe(0);
    expect(fs.readFileSync(out, "utf8")).toContain("Duan sum");
  });

  it("requires a source", async () => {
    expect(await main([])).toBe(1);
  });

  it("fails cleanly on a missing data directory", async () => {
    expect(
      await main(["--preset", "fig2", "--data", path.join(tmpDir, "nope")]),
    ).toBe(1);
  });

  it("preset requires data directory", async () => {
    expect(await main(["--preset", "fig2"])).toBe(1);
  });
});
