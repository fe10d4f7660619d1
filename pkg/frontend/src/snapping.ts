/**
 * Twist-dial snapping against the allowed sets fetched from /catalog.
 * Mirrors the service's tie-break (equidistant values go to the smaller
 * magnitude member); the service's /validate stays the authority.
 */

function wrapDeg(angle: number): number {
  let wrapped = ((angle + 180) % 360) - 180;
  if (wrapped <= -180) wrapped += 360;
  return wrapped;
}

export function snapTwist1(valueDeg: number, allowed: number[]): number {
  let best = allowed[0];
  let bestKey: [number, number] = [Infinity, Infinity];
  for (const member of allowed) {
    const key: [number, number] = [Math.abs(wrapDeg(valueDeg - member)), Math.abs(member)];
    if (key[0] < bestKey[0] - 1e-12 || (Math.abs(key[0] - bestKey[0]) <= 1e-12 && key[1] < bestKey[1])) {
      best = member;
      bestKey = key;
    }
  }
  return best;
}

export function snapTwist2(valueDeg: number, allowed: number[]): number {
  const lo = Math.min(...allowed);
  const hi = Math.max(...allowed);
  const clamped = Math.min(hi, Math.max(lo, valueDeg));
  let best = allowed[0];
  let bestKey: [number, number] = [Infinity, Infinity];
  for (const member of allowed) {
    const key: [number, number] = [Math.abs(clamped - member), Math.abs(member)];
    if (key[0] < bestKey[0] - 1e-12 || (Math.abs(key[0] - bestKey[0]) <= 1e-12 && key[1] < bestKey[1])) {
      best = member;
      bestKey = key;
    }
  }
  return best;
}
