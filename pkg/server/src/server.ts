/**
 * HTTP surface of the embedding service.
 *
 *   POST /embed   {"texts": [string, ...]}          1..256 texts, <= 8192
 *                 -> {"dim": n, "embeddings": [[...], ...]} in request order
 *   GET  /health  -> {"status": "ok", "model": ..., "dim": n, "pooling": ...}
 *                 503 {"status": "loading"} until the encoder is ready
 *
 * Errors are JSON bodies {"error": string} with a non-200 status:
 * 400 malformed JSON or empty batch, 413 oversize batch or text,
 * 500 encoder failure, 404 unknown route.
 */

import { createServer as createHttpServer, IncomingMessage, Server, ServerResponse } from "node:http";
import type { Encoder } from "./encoder.js";

export const MAX_BATCH = 256;
export const MAX_TEXT_LENGTH = 8192;

interface EncoderRef {
  current: Encoder | null;
}

function sendJson(res: ServerResponse, status: number, payload: unknown): void {
  const body = JSON.stringify(payload);
  res.writeHead(status, {
    "content-type": "application/json",
    "content-length": Buffer.byteLength(body),
  });
  res.end(body);
}

function readBody(req: IncomingMessage): Promise<string> {
  return new Promise((resolve, reject) => {
    const chunks: Buffer[] = [];
    req.on("data", (chunk) => chunks.push(chunk));
    req.on("end", () => resolve(Buffer.concat(chunks).toString("utf-8")));
    req.on("error", reject);
  });
}

/** Validates the request body; returns the texts or responds with an error. */
function parseEmbedRequest(res: ServerResponse, body: string): string[] | null {
  let payload: unknown;
  try {
    payload = JSON.parse(body);
  } catch {
    sendJson(res, 400, { error: "request body is not valid JSON" });
    return null;
  }
  const texts = (payload as { texts?: unknown })?.texts;
  if (!Array.isArray(texts) || !texts.every((t) => typeof t === "string")) {
    sendJson(res, 400, { error: 'expected {"texts": [string, ...]}' });
    return null;
  }
  if (texts.length === 0) {
    sendJson(res, 400, { error: "texts must not be empty" });
    return null;
  }
  if (texts.length > MAX_BATCH) {
    sendJson(res, 413, { error: `batch too large: ${texts.length} > ${MAX_BATCH}` });
    return null;
  }
  const tooLong = texts.findIndex((t) => t.length > MAX_TEXT_LENGTH);
  if (tooLong >= 0) {
    sendJson(res, 413, {
      error: `text ${tooLong} too long: ${texts[tooLong].length} > ${MAX_TEXT_LENGTH}`,
    });
    return null;
  }
  return texts as string[];
}

export function createServer(encoderRef: EncoderRef): Server {
  return createHttpServer(async (req, res) => {
    try {
      if (req.method === "GET" && req.url === "/health") {
        const encoder = encoderRef.current;
        if (encoder === null) {
          sendJson(res, 503, { status: "loading" });
          return;
        }
        sendJson(res, 200, {
          status: "ok",
          model: encoder.model,
          dim: encoder.dim,
          pooling: encoder.pooling,
        });
        return;
      }
      if (req.method === "POST" && req.url === "/embed") {
        const encoder = encoderRef.current;
        if (encoder === null) {
          sendJson(res, 503, { error: "model is still loading" });
          return;
        }
        const texts = parseEmbedRequest(res, await readBody(req));
        if (texts === null) {
          return;
        }
        const embeddings = await encoder.encode(texts);
        sendJson(res, 200, { dim: encoder.dim, embeddings });
        return;
      }
      sendJson(res, 404, { error: `no route for ${req.method} ${req.url}` });
    } catch (err) {
      sendJson(res, 500, { error: `encoder failure: ${String(err)}` });
    }
  });
}
