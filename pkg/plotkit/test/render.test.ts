import { spawnSync } from "node:child_process";
import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { readCsv } from "../src/csv.js";
import { buildFigure } from "../src/figures.js";
import { renderSvg } from "../src/svg.js";

const HERE = fileURLToPath(new URL(".", import.meta.url));
const FIXTURES = join(HERE, "fixtures");
const CLI = join(HERE, "..", "dist", "cli.js");

const load = (name: string) => readCsv(join(FIXTURES, name));

function cli(args: string[]) {
  return spawnSync("node", [CLI, ...args], { encoding: "utf8" });
}

const GOLDEN: Record<string, string[]> = {
  fig2: ["regime.csv"],
  fig3: ["noise.csv"],
  fig4: ["rate.csv", "blocks.csv"],
  fig5: ["scint.csv"],
  fig6: ["slant_rate.csv"],
};

describe("renderSvg", () => {
  it("is a pure function of its inputs", () => {
    const panels = buildFigure("fig6", [load("slant_rate.csv")]);
    const first = renderSvg(panels, "fig6 | test");
    const second = renderSvg(
      buildFigure("fig6", [load("slant_rate.csv")]),
      "fig6 | test",
    );
    expect(first).toBe(second);
    expect(first.startsWith("<svg ")).toBe(true);
    expect(first).not.toMatch(/\d{4}-\d{2}-\d{2}/); // no dates anywhere
  });

  it("keeps zero rates off the log axis without dropping the curve", () => {
    const panels = buildFigure("fig6", [load("slant_rate.csv")]);
    const svg = renderSvg(panels, "footer");
    expect(svg).toContain("polyline");
  });
});

describe("plotkit CLI", () => {
  it("renders every golden figure deterministically", () => {
    const dir = mkdtempSync(join(tmpdir(), "plotkit-out-"));
    for (const [figureId, inputs] of Object.entries(GOLDEN)) {
      const args = [
        figureId,
        "--in",
        ...inputs.map((f) => join(FIXTURES, f)),
        "--out",
      ];
      const first = join(dir, `${figureId}-a.svg`);
      const second = join(dir, `${figureId}-b.svg`);
      expect(cli([...args, first]).status).toBe(0);
      expect(cli([...args, second]).status).toBe(0);
      const bytesA = readFileSync(first);
      const bytesB = readFileSync(second);
      expect(bytesA.equals(bytesB)).toBe(true);
      expect(bytesA.length).toBeGreaterThan(2000);
    }
  });

  it("fails without writing on missing columns", () => {
    const dir = mkdtempSync(join(tmpdir(), "plotkit-out-"));
    const out = join(dir, "bad.svg");
    const result = cli([
      "fig6",
      "--in",
      join(FIXTURES, "regime.csv"),
      "--out",
      out,
    ]);
    expect(result.status).toBe(1);
    expect(result.stderr).toContain("missing column");
    expect(existsSync(out)).toBe(false);
  });

  it("fails on mixed config hashes", () => {
    const dir = mkdtempSync(join(tmpdir(), "plotkit-out-"));
    const result = cli([
      "fig6",
      "--in",
      join(FIXTURES, "slant_rate.csv"),
      join(FIXTURES, "rate.csv"),
      "--out",
      join(dir, "mixed.svg"),
    ]);
    expect(result.status).toBe(1);
    expect(result.stderr).toContain("mixed config hashes");
    expect(existsSync(join(dir, "mixed.svg"))).toBe(false);
  });

  it("fails on an empty csv", () => {
    const dir = mkdtempSync(join(tmpdir(), "plotkit-out-"));
    const empty = join(dir, "empty.csv");
    writeFileSync(empty, "");
    const result = cli(["fig6", "--in", empty, "--out", join(dir, "x.svg")]);
    expect(result.status).toBe(1);
    expect(existsSync(join(dir, "x.svg"))).toBe(false);
  });

  it("reports usage errors distinctly", () => {
    expect(cli([]).status).toBe(2);
    expect(cli(["fig6", "--in", "x.csv"]).status).toBe(2); // no --out
    expect(
      cli(["fig6", "--in", "x.csv", "--out", "fig.png"]).status,
    ).toBe(2); // svg only
  });
});
