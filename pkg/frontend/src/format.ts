// Deterministic number formatting shared by every view, so the same payload
// always renders to the same markup.

export function fmt(v: number): string {
  if (!isFinite(v)) return String(v);
  const a = Math.abs(v);
  if (a !== 0 && (a >= 1e6 || a < 1e-3)) return v.toExponential(2);
  if (Number.isInteger(v) && a < 1e6) return String(v);
  return a >= 100 ? v.toFixed(1) : v.toFixed(3);
}

export function pct(v: number): string {
  return (100 * v).toFixed(1).replace(/\.0$/, "") + "%";
}

export function pValue(p: number): string {
  return p < 1e-4 ? p.toExponential(1) : p.toFixed(4);
}

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
