import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { CsvError, readCsv } from "../src/csv.js";
import { buildFigure } from "../src/figures.js";

const HERE = fileURLToPath(new URL(".", import.meta.url));
const FIXTURES = join(HERE, "fixtures");

const load = (name: string) => readCsv(join(FIXTURES, name));

describe("buildFigure", () => {
  it("fig2 produces two log-log panels", () => {
    const panels = buildFigure("fig2", [load("regime.csv")]);
    expect(panels).toHaveLength(2);
    expect(panels[0].xLog && panels[0].yLog).toBe(true);
    expect(panels[0].series[0].points.length).toBeGreaterThan(3);
  });

  it("fig3 overlays the two oscillator schemes", () => {
    const panels = buildFigure("fig3", [load("noise.csv")]);
    expect(panels).toHaveLength(1);
    expect(panels[0].series.map((s) => s.label)).toEqual([
      "transmitted LO",
      "local LO",
    ]);
  });

  it("fig4 keeps rate panels on a log rate axis", () => {
    const panels = buildFigure("fig4", [load("rate.csv"), load("blocks.csv")]);
    expect(panels).toHaveLength(2);
    expect(panels.every((p) => p.yLog)).toBe(true);
    expect(panels[1].xLog).toBe(true);
  });

  it("fig5 groups scintillation by the non-swept variable", () => {
    const panels = buildFigure("fig5", [load("scint.csv")]);
    expect(panels).toHaveLength(1);
    expect(panels[0].xLabel).toContain("zenith");
    expect(panels[0].series.length).toBe(2); // two platform altitudes
  });

  it("fig6 draws one curve per zenith angle", () => {
    const panels = buildFigure("fig6", [load("slant_rate.csv")]);
    expect(panels).toHaveLength(1);
    expect(panels[0].series.length).toBe(2);
    expect(panels[0].yLog).toBe(true);
  });

  it("rejects missing columns with their names", () => {
    expect(() => buildFigure("fig6", [load("regime.csv")])).toThrow(CsvError);
    expect(() => buildFigure("fig6", [load("regime.csv")])).toThrow(
      /rx_altitude_m/,
    );
  });

  it("rejects mixed hashes across merged inputs", () => {
    expect(() =>
      buildFigure("fig6", [load("slant_rate.csv"), load("rate.csv")]),
    ).toThrow(/mixed config hashes/);
  });

  it("rejects unknown figure ids", () => {
    expect(() => buildFigure("fig9", [load("rate.csv")])).toThrow(/unknown/);
  });

  it("rejects wrong input counts", () => {
    expect(() => buildFigure("fig4", [load("rate.csv")])).toThrow(/input/);
  });
});
