/**
 * Entry point. Configuration via environment variables:
 *
 *   PORT           listen port (default 8089)
 *   EMBED_BACKEND  "hash" (default, offline) or "transformers"
 *   EMBED_MODEL    model id for the transformers backend, e.g. a
 *                  multilingual sentence-transformer checkpoint
 *
 * The server starts listening immediately and reports 503 on /health
 * until the encoder has finished loading.
 */

import { createEncoder, Encoder } from "./encoder.js";
import { createServer } from "./server.js";

const port = Number(process.env.PORT ?? 8089);
const backend = process.env.EMBED_BACKEND ?? "hash";
const model = process.env.EMBED_MODEL;

const encoderRef: { current: Encoder | null } = { current: null };
const server = createServer(encoderRef);

server.listen(port, () => {
  console.log(`embed-server listening on :${port} (backend=${backend})`);
});

createEncoder(backend, model)
  .then((encoder) => {
    encoderRef.current = encoder;
    console.log(`encoder ready: ${encoder.model} (dim=${encoder.dim}, pooling=${encoder.pooling})`);
  })
  .catch((err) => {
    console.error(`failed to load encoder: ${err}`);
    server.close(() => process.exit(1));
  });
