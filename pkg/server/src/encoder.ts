/**
 * Sentence encoders behind a common interface.
 *
 * Two backends:
 *  - "hash": a dependency-free deterministic encoder (character 3-grams
 *    hashed with 64-bit FNV-1a into a 256-dim L2-normalized count vector).
 *    Bit-compatible with the evaluation toolkit's built-in test embedder,
 *    so caches and end-to-end tests line up across the two codebases.
 *  - "transformers": a real multilingual sentence-transformer via
 *    @xenova/transformers (optional dependency), mean pooling over the
 *    final hidden states. The model id is configuration, not code.
 */

export interface Encoder {
  readonly model: string;
  readonly dim: number;
  readonly pooling: string;
  encode(texts: string[]): Promise<number[][]>;
}

const FNV_OFFSET = 0xcbf29ce484222325n;
const FNV_PRIME = 0x100000001b3n;
const FNV_MASK = 0xffffffffffffffffn;

export function fnv1a64(data: Uint8Array): bigint {
  let hash = FNV_OFFSET;
  for (const byte of data) {
    hash ^= BigInt(byte);
    hash = (hash * FNV_PRIME) & FNV_MASK;
  }
  return hash;
}

const HASH_DIM = 256;
const utf8 = new TextEncoder();

/** Character-3-gram hash embedding; e1 fallback for texts shorter than 3. */
export function hashEmbed(text: string): number[] {
  const counts = new Array<number>(HASH_DIM).fill(0);
  const chars = Array.from(text); // code points, matching Python semantics
  for (let i = 0; i + 2 < chars.length; i++) {
    const gram = chars[i] + chars[i + 1] + chars[i + 2];
    const bucket = Number(fnv1a64(utf8.encode(gram)) % BigInt(HASH_DIM));
    counts[bucket] += 1;
  }
  let norm = Math.sqrt(counts.reduce((acc, c) => acc + c * c, 0));
  if (norm === 0) {
    counts[0] = 1;
    return counts;
  }
  return counts.map((c) => c / norm);
}

export class HashEncoder implements Encoder {
  readonly model = "hash-3gram-256";
  readonly dim = HASH_DIM;
  readonly pooling = "none";

  async encode(texts: string[]): Promise<number[][]> {
    return texts.map(hashEmbed);
  }
}

/** Lazily loaded transformer backend; requires @xenova/transformers. */
export class TransformersEncoder implements Encoder {
  readonly model: string;
  readonly pooling = "mean";
  private extractor: any = null;
  private dimension = 0;

  constructor(model: string) {
    this.model = model;
  }

  get dim(): number {
    if (this.dimension === 0) {
      throw new Error("encoder not loaded yet");
    }
    return this.dimension;
  }

  async load(): Promise<void> {
    const { pipeline } = await import("@xenova/transformers");
    this.extractor = await pipeline("feature-extraction", this.model);
    const probe = await this.extractor("warmup", { pooling: "mean", normalize: false });
    this.dimension = probe.dims[probe.dims.length - 1];
  }

  async encode(texts: string[]): Promise<number[][]> {
    if (this.extractor === null) {
      throw new Error("encoder not loaded yet");
    }
    const rows: number[][] = [];
    for (const text of texts) {
      const output = await this.extractor(text, { pooling: "mean", normalize: false });
      rows.push(Array.from(output.data as Float32Array));
    }
    return rows;
  }
}

export async function createEncoder(
  backend: string,
  model: string | undefined,
): Promise<Encoder> {
  if (backend === "hash") {
    return new HashEncoder();
  }
  if (backend === "transformers") {
    if (!model) {
      throw new Error("EMBED_MODEL is required for the transformers backend");
    }
    const encoder = new TransformersEncoder(model);
    await encoder.load();
    return encoder;
  }
  throw new Error(`unknown EMBED_BACKEND "${backend}" (expected hash or transformers)`);
}
