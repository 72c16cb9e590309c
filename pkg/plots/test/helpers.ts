export const HEADER =
  "schema_id,axis,axis_value,discipline,g,i,k_or_longrun,x,p_hat,ci_low," +
  "ci_high,ub_prob,lb_prob,ub_exponent,lb_exponent,rr_p_hat,flags," +
  "n_scale,b,service_kind,service_param,n_scaling,reps,seed";

export interface RowSpec {
  axisValue: number;
  g: number;
  pHat: number | "";
  ciLow?: number | "";
  ciHigh?: number | "";
  ubProb?: number | "";
  lbProb?: number | "";
  rrPHat?: number | "";
  flags?: string;
  axis?: string;
  schema?: string;
}

export function makeCsv(rows: RowSpec[]): string {
  const lines = [HEADER];
  for (const r of rows) {
    lines.push([
      r.schema ?? "aoi-grr-sweep-v1",
      r.axis ?? "n",
      r.axisValue,
      "ipq",
      r.g,
      r.g,
      1,
      8,
      r.pHat,
      r.ciLow ?? (typeof r.pHat === "number" ? r.pHat * 0.9 : ""),
      r.ciHigh ?? (typeof r.pHat === "number" ? r.pHat * 1.1 : ""),
      r.ubProb ?? "",
      r.lbProb ?? "",
      "",
      "",
      r.rrPHat ?? "",
      r.flags ?? "",
      3 * r.axisValue,
      5.0,
      "exponential",
      0.3333333333333333,
      "total",
      1000,
      7,
    ].join(","));
  }
  return lines.join("\n") + "\n";
}
