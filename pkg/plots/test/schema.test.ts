import { describe, expect, it } from "vitest";
import { InsufficientRows, SchemaMismatch, byGroup, parseSweepCsv } from "../src/schema.js";
import { HEADER, makeCsv } from "./helpers.js";

describe("parseSweepCsv", () => {
  it("parses rows and null-propagates empty numerics", () => {
    const rows = parseSweepCsv(makeCsv([
      { axisValue: 4, g: 1, pHat: 0.1, ubProb: 0.3, lbProb: 0.05 },
      { axisValue: 6, g: 1, pHat: "", flags: "estimate_error:HorizonTooShort" },
    ]));
    expect(rows).toHaveLength(2);
    expect(rows[0].pHat).toBeCloseTo(0.1, 12);
    expect(rows[0].ubProb).toBeCloseTo(0.3, 12);
    expect(rows[1].pHat).toBeNull();
    expect(rows[1].flags).toContain("estimate_error:HorizonTooShort");
  });

  it("refuses unknown schema ids", () => {
    const text = makeCsv([
      { axisValue: 4, g: 1, pHat: 0.1, schema: "aoi-grr-sweep-v999" },
      { axisValue: 6, g: 1, pHat: 0.1, schema: "aoi-grr-sweep-v999" },
    ]);
    expect(() => parseSweepCsv(text)).toThrow(SchemaMismatch);
  });

  it("refuses missing columns", () => {
    const bad = "schema_id,axis\naoi-grr-sweep-v1,n\n";
    expect(() => parseSweepCsv(bad)).toThrow(SchemaMismatch);
  });

  it("needs at least two axis values", () => {
    const text = makeCsv([
      { axisValue: 4, g: 1, pHat: 0.1 },
      { axisValue: 4, g: 2, pHat: 0.2 },
    ]);
    expect(() => parseSweepCsv(text)).toThrow(InsufficientRows);
    expect(() => parseSweepCsv(HEADER + "\n")).toThrow(InsufficientRows);
  });

  it("groups rows by panel in ascending group order", () => {
    const rows = parseSweepCsv(makeCsv([
      { axisValue: 6, g: 2, pHat: 0.2 },
      { axisValue: 4, g: 1, pHat: 0.1 },
      { axisValue: 4, g: 2, pHat: 0.3 },
      { axisValue: 6, g: 1, pHat: 0.05 },
    ]));
    const groups = byGroup(rows);
    expect([...groups.keys()]).toEqual([1, 2]);
    expect(groups.get(2)!.map((r) => r.axisValue)).toEqual([4, 6]);
  });
});
