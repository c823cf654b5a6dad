// Control-panel state round-trips through the URL query string, so any
// analysis view is a shareable link.

export interface PanelState {
  api?: string;
  dataset?: string;
  column?: string;
  value?: string;
  fraction?: number;
  metric?: string;
  operator?: string;
  direction?: string;
  smoothing?: number;
  rangeLo?: number;
  rangeHi?: number;
  view?: string;
}

const NUMERIC_KEYS = new Set(["fraction", "smoothing", "rangeLo", "rangeHi"]);

export function encodeState(state: PanelState): string {
  const params = new URLSearchParams();
  for (const [key, value] of Object.entries(state)) {
    if (value === undefined || value === null || value === "") continue;
    params.set(key, String(value));
  }
  return params.toString();
}

export function decodeState(query: string): PanelState {
  const params = new URLSearchParams(query.replace(/^\?/, ""));
  const state: PanelState = {};
  params.forEach((raw, key) => {
    if (NUMERIC_KEYS.has(key)) {
      const parsed = Number(raw);
      if (!Number.isNaN(parsed)) (state as any)[key] = parsed;
    } else {
      (state as any)[key] = raw;
    }
  });
  return state;
}

export function pushState(state: PanelState): void {
  const query = encodeState(state);
  history.replaceState(null, "", query ? `?${query}` : location.pathname);
}

export function readState(): PanelState {
  return decodeState(location.search);
}
