/**
 * Figure definitions: which CSV columns each figure consumes and how the
 * panels are laid out. plotkit never computes physics; it only maps
 * columns to axes.
 */
import { CsvError, Table, mergeTables, numeric, requireColumns } from "./csv.js";
import { Panel, Series } from "./svg.js";

export interface Figure {
  id: string;
  description: string;
  /** Number of input CSVs accepted: [min, max]. */
  inputs: [number, number];
  build(tables: Table[]): Panel[];
}

function sortedBy(rows: Record<string, string>[], column: string) {
  return [...rows].sort((a, b) => numeric(a, column) - numeric(b, column));
}

function seriesBy(
  table: Table,
  xCol: string,
  yCol: string,
  groupCol: string | null,
  labelOf: (key: string) => string,
): Series[] {
  if (groupCol === null) {
    return [
      {
        label: yCol,
        points: sortedBy(table.rows, xCol).map(
          (r) => [numeric(r, xCol), numeric(r, yCol)] as [number, number],
        ),
      },
    ];
  }
  const keys = [...new Set(table.rows.map((r) => r[groupCol]))].sort(
    (a, b) => Number(a) - Number(b),
  );
  return keys.map((key) => ({
    label: labelOf(key),
    points: sortedBy(
      table.rows.filter((r) => r[groupCol] === key),
      xCol,
    ).map((r) => [numeric(r, xCol), numeric(r, yCol)] as [number, number]),
  }));
}

/** Pick the slant sweep axis: whichever of the two columns actually varies. */
function slantAxis(table: Table): { xCol: string; groupCol: string } {
  requireColumns(table, ["zenith_deg", "rx_altitude_m"]);
  const zeniths = new Set(table.rows.map((r) => r.zenith_deg));
  const altitudes = new Set(table.rows.map((r) => r.rx_altitude_m));
  if (altitudes.size >= zeniths.size) {
    return { xCol: "rx_altitude_m", groupCol: "zenith_deg" };
  }
  return { xCol: "zenith_deg", groupCol: "rx_altitude_m" };
}

const fig2: Figure = {
  id: "fig2",
  description: "turbulence-regime diagnostics versus distance",
  inputs: [1, 4],
  build(tables) {
    const table = mergeTables(tables);
    requireColumns(table, ["z_m", "rytov_sq", "z_max_m"]);
    const rows = sortedBy(table.rows, "z_m");
    const rytov: Panel = {
      title: "Turbulence strength",
      xLabel: "path length z (m)",
      yLabel: "Rytov variance",
      xLog: true,
      yLog: true,
      series: [
        {
          label: "rytov_sq",
          points: rows.map((r) => [numeric(r, "z_m"), numeric(r, "rytov_sq")]),
        },
        {
          label: "weak-regime bound",
          dash: "6 4",
          points: rows.map((r) => [numeric(r, "z_m"), 1.0]),
        },
      ],
    };
    const zmax: Panel = {
      title: "Distance bound",
      xLabel: "path length z (m)",
      yLabel: "length (m)",
      xLog: true,
      yLog: true,
      series: [
        {
          label: "z_max_m",
          points: rows.map((r) => [numeric(r, "z_m"), numeric(r, "z_max_m")]),
        },
        {
          label: "z",
          dash: "6 4",
          points: rows.map((r) => [numeric(r, "z_m"), numeric(r, "z_m")]),
        },
      ],
    };
    return [rytov, zmax];
  },
};

const fig3: Figure = {
  id: "fig3",
  description: "receiver noise photons for the two local-oscillator schemes",
  inputs: [1, 4],
  build(tables) {
    const table = mergeTables(tables);
    requireColumns(table, ["z_m", "n_tlo", "n_llo"]);
    return [
      {
        title: "Receiver noise photons",
        xLabel: "path length z (m)",
        yLabel: "photons per mode",
        xLog: true,
        yLog: true,
        series: [
          ...seriesBy(table, "z_m", "n_tlo", null, () => "n_tlo"),
          ...seriesBy(table, "z_m", "n_llo", null, () => "n_llo"),
        ].map((s, i) => ({ ...s, label: i === 0 ? "transmitted LO" : "local LO" })),
      },
    ];
  },
};

const fig4: Figure = {
  id: "fig4",
  description: "composable rate versus distance and versus block size",
  inputs: [2, 2],
  build(tables) {
    const [byDistance, byBlocks] = tables;
    requireColumns(byDistance, ["z_m", "k_avg"]);
    requireColumns(byBlocks, ["block_size", "k_avg"]);
    return [
      {
        title: "Secret key rate versus distance",
        xLabel: "path length z (m)",
        yLabel: "rate (bits/use)",
        xLog: false,
        yLog: true,
        series: seriesBy(byDistance, "z_m", "k_avg", "f_th",
          (k) => `f_th = ${k}`),
      },
      {
        title: "Secret key rate versus block size",
        xLabel: "block size N",
        yLabel: "rate (bits/use)",
        xLog: true,
        yLog: true,
        series: seriesBy(byBlocks, "block_size", "k_avg", "f_th",
          (k) => `f_th = ${k}`),
      },
    ];
  },
};

const fig5: Figure = {
  id: "fig5",
  description: "scintillation index over slant paths",
  inputs: [1, 2],
  build(tables) {
    return tables.map((table) => {
      requireColumns(table, ["scint_index"]);
      const { xCol, groupCol } = slantAxis(table);
      return {
        title: `Scintillation index versus ${xCol === "zenith_deg" ? "zenith angle" : "platform altitude"}`,
        xLabel: xCol === "zenith_deg" ? "zenith angle (deg)" : "platform altitude (m)",
        yLabel: "scintillation index",
        xLog: false,
        yLog: false,
        series: seriesBy(table, xCol, "scint_index", groupCol, (k) =>
          groupCol === "zenith_deg" ? `zenith ${k} deg` : `altitude ${k} m`,
        ),
      };
    });
  },
};

const fig6: Figure = {
  id: "fig6",
  description: "composable rate to a high-altitude platform",
  inputs: [1, 4],
  build(tables) {
    const table = mergeTables(tables);
    requireColumns(table, ["rx_altitude_m", "zenith_deg", "k_avg"]);
    return [
      {
        title: "Secret key rate versus platform altitude",
        xLabel: "platform altitude (m)",
        yLabel: "rate (bits/use)",
        xLog: false,
        yLog: true,
        series: seriesBy(table, "rx_altitude_m", "k_avg", "zenith_deg",
          (k) => `zenith ${k} deg`),
      },
    ];
  },
};

export const FIGURES: Record<string, Figure> = Object.fromEntries(
  [fig2, fig3, fig4, fig5, fig6].map((f) => [f.id, f]),
);

export function buildFigure(id: string, tables: Table[]): Panel[] {
  const figure = FIGURES[id];
  if (!figure) {
    throw new CsvError(
      `unknown figure id ${id}; expected one of ${Object.keys(FIGURES).join(", ")}`,
    );
  }
  const [min, max] = figure.inputs;
  if (tables.length < min || tables.length > max) {
    throw new CsvError(
      `${id} takes ${min === max ? min : `${min}-${max}`} input file(s), ` +
        `got ${tables.length}`,
    );
  }
  return figure.build(tables);
}
