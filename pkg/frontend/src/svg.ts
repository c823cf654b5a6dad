// Minimal hand-rolled SVG helpers. Views build plots as markup strings so
// they can be snapshot-tested without a DOM; the numbers they plot come
// straight from API payloads (scales here are pixel mapping, not stats).

export interface Scale {
  (v: number): number;
  domain: [number, number];
}

export function linearScale(domain: [number, number],
                            range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const scale = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  scale.domain = domain;
  return scale;
}

export function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return lo <= hi ? [lo, hi] : [0, 1];
}

export function pathFrom(xs: number[], ys: number[],
                         x: (v: number) => number,
                         y: (v: number) => number): string {
  const parts: string[] = [];
  for (let i = 0; i < xs.length; i++) {
    const cmd = i === 0 ? "M" : "L";
    parts.push(`${cmd}${x(xs[i]).toFixed(1)},${y(ys[i]).toFixed(1)}`);
  }
  return parts.join(" ");
}

export function axisTicks(lo: number, hi: number, n = 5): number[] {
  const ticks: number[] = [];
  for (let i = 0; i < n; i++) ticks.push(lo + ((hi - lo) * i) / (n - 1));
  return ticks;
}
