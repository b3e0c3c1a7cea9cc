/** Exact rational arithmetic on bigint, mirroring the wire format "p/q".
 *
 * Offsets live on the unit circle R/Z, so every public helper that
 * produces an offset reduces into [0, 1). Denominators stay positive and
 * fractions stay reduced, which makes serialization canonical: equal
 * rationals always print the same string.
 */

export interface Rat {
  readonly n: bigint;
  readonly d: bigint;
}

function gcd(a: bigint, b: bigint): bigint {
  a = a < 0n ? -a : a;
  b = b < 0n ? -b : b;
  while (b) {
    [a, b] = [b, a % b];
  }
  return a;
}

export function rat(n: bigint | number, d: bigint | number = 1n): Rat {
  let nn = BigInt(n);
  let dd = BigInt(d);
  if (dd === 0n) throw new Error("zero denominator");
  if (dd < 0n) {
    nn = -nn;
    dd = -dd;
  }
  const g = gcd(nn, dd);
  return g > 1n ? { n: nn / g, d: dd / g } : { n: nn, d: dd };
}

export const ZERO: Rat = { n: 0n, d: 1n };

const FRACTION_RE = /^-?\d+(\/[1-9]\d*)?$/;

/** Parse "p" or "p/q". Rejects anything else, including floats. */
export function parseRat(text: string): Rat {
  if (!FRACTION_RE.test(text)) throw new Error(`not a fraction: ${JSON.stringify(text)}`);
  const slash = text.indexOf("/");
  if (slash < 0) return rat(BigInt(text));
  return rat(BigInt(text.slice(0, slash)), BigInt(text.slice(slash + 1)));
}

export function ratToString(r: Rat): string {
  return r.d === 1n ? r.n.toString() : `${r.n}/${r.d}`;
}

export function add(a: Rat, b: Rat): Rat {
  return rat(a.n * b.d + b.n * a.d, a.d * b.d);
}

export function sub(a: Rat, b: Rat): Rat {
  return rat(a.n * b.d - b.n * a.d, a.d * b.d);
}

export function neg(a: Rat): Rat {
  return { n: -a.n, d: a.d };
}

export function cmp(a: Rat, b: Rat): number {
  const lhs = a.n * b.d;
  const rhs = b.n * a.d;
  return lhs < rhs ? -1 : lhs > rhs ? 1 : 0;
}

export function eq(a: Rat, b: Rat): boolean {
  return a.n === b.n && a.d === b.d;
}

/** Reduce into [0, 1) with floor semantics, also for negatives. */
export function mod1(a: Rat): Rat {
  let m = a.n % a.d;
  if (m < 0n) m += a.d;
  return rat(m, a.d);
}

export function toNumber(a: Rat): number {
  return Number(a.n) / Number(a.d);
}

function floorDiv(a: bigint, b: bigint): bigint {
  // b > 0 everywhere this is used
  let q = a / b;
  if (a % b !== 0n && a < 0n) q -= 1n;
  return q;
}

/** Nearest multiple of 1/grid, then reduced into [0, 1).
 *
 * Ties round up; any tie-break would do, what matters is that the
 * result lands exactly on the grid.
 */
export function snap(a: Rat, grid: number | bigint): Rat {
  const g = BigInt(grid);
  if (g < 1n) throw new Error(`snap grid must be >= 1, got ${g}`);
  const q = floorDiv(2n * a.n * g + a.d, 2n * a.d);
  return mod1(rat(q, g));
}

/** Parse a wire point ["p/q", "p/q"] into plot coordinates. */
export function pointToNumbers(pt: [string, string]): [number, number] {
  return [toNumber(parseRat(pt[0])), toNumber(parseRat(pt[1]))];
}
