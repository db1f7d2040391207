/**
 * Ink capture model: pointer samples in, stroke payloads out.
 *
 * Samples are collected at device resolution and downsampled to a fixed
 * point budget before upload; the recognizer resamples server-side
 * anyway, so the budget only bounds payload size. A tap that never
 * travels produces no payload at all.
 */

export interface InkSample {
  x: number;
  y: number;
  t: number;
}

export const MAX_POINTS_PER_STROKE = 200;
// taps jitter by a couple of device pixels; below this nothing was drawn
const TAP_EXTENT = 2.0;

export function downsample(
  points: InkSample[],
  limit: number = MAX_POINTS_PER_STROKE,
): InkSample[] {
  if (points.length <= limit) return [...points];
  const out: InkSample[] = [];
  const last = points.length - 1;
  for (let i = 0; i < limit; i++) {
    const idx = Math.round((i * last) / (limit - 1));
    out.push(points[idx]!);
  }
  return out;
}

function extent(points: InkSample[]): number {
  let minX = Infinity;
  let maxX = -Infinity;
  let minY = Infinity;
  let maxY = -Infinity;
  for (const p of points) {
    minX = Math.min(minX, p.x);
    maxX = Math.max(maxX, p.x);
    minY = Math.min(minY, p.y);
    maxY = Math.max(maxY, p.y);
  }
  return Math.hypot(maxX - minX, maxY - minY);
}

export class StrokeCapture {
  private strokes: InkSample[][] = [];
  private current: InkSample[] | null = null;

  pointerDown(x: number, y: number, t: number): void {
    this.current = [{ x, y, t }];
  }

  pointerMove(x: number, y: number, t: number): void {
    this.current?.push({ x, y, t });
  }

  pointerUp(x: number, y: number, t: number): void {
    if (!this.current) return;
    this.current.push({ x, y, t });
    this.strokes.push(this.current);
    this.current = null;
  }

  /** Strokes drawn so far, downsampled; degenerate taps dropped. */
  takeStrokes(): InkSample[][] {
    const done = this.strokes.filter((s) => extent(s) > TAP_EXTENT);
    this.strokes = [];
    this.current = null;
    return done.map((s) => downsample(s));
  }
}

/**
 * Wire format for POST /annotations, or null when nothing was actually
 * drawn (zero-length tap) so no request should be sent.
 */
export function buildInkPayload(
  strokes: InkSample[][],
  pageIndex: number,
  tool: string,
): {
  pageIndex: number;
  timeMs: number;
  strokes: number[][][];
  tool: string;
} | null {
  const kept = strokes.filter((s) => s.length >= 2 && extent(s) > TAP_EXTENT);
  if (kept.length === 0) return null;
  const timeMs = Math.max(...kept.map((s) => s[s.length - 1]!.t));
  return {
    pageIndex,
    timeMs,
    strokes: kept.map((s) => downsample(s).map((p) => [p.x, p.y])),
    tool,
  };
}
