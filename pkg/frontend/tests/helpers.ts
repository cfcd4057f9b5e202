// Shared test utilities: a deterministic RNG for property loops and an
// attribute-diff harness over scene descriptions.

export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** Flatten nested plain objects/arrays into dotted attribute paths. */
export function flattenAttributes(value: unknown, prefix = ""): Map<string, unknown> {
  const out = new Map<string, unknown>();
  if (Array.isArray(value)) {
    value.forEach((item, i) => {
      for (const [k, v] of flattenAttributes(item, `${prefix}[${i}]`)) out.set(k, v);
    });
  } else if (value !== null && typeof value === "object") {
    for (const [key, item] of Object.entries(value as Record<string, unknown>)) {
      const path = prefix ? `${prefix}.${key}` : key;
      for (const [k, v] of flattenAttributes(item, path)) out.set(k, v);
    }
  } else {
    out.set(prefix, value);
  }
  return out;
}

/** Attribute paths whose values differ between two descriptions. */
export function diffAttributes(a: unknown, b: unknown): string[] {
  const flatA = flattenAttributes(a);
  const flatB = flattenAttributes(b);
  const paths = new Set([...flatA.keys(), ...flatB.keys()]);
  const differing: string[] = [];
  for (const path of paths) {
    if (!flatA.has(path) || !flatB.has(path) || !Object.is(flatA.get(path), flatB.get(path))) {
      differing.push(path);
    }
  }
  return differing.sort();
}
