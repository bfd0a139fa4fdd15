// Protocol server: stdio line loop, optional HTTP mirror on /score.
// Requests are answered in arrival order; the client tolerates reordering,
// so in-order is simply the easiest honest implementation.

import { createInterface } from "node:readline";
import { createServer, IncomingMessage, ServerResponse } from "node:http";

import {
  Handshake,
  PROTOCOL_VERSION,
  ScoreRequest,
  ScoreResponse,
  Task,
  parseRequestLine,
  serialize,
} from "./protocol.js";

export interface Scorer {
  score(request: ScoreRequest): ScoreResponse | Promise<ScoreResponse>;
}

export interface ServerConfig {
  scorer: Scorer;
  capabilities: Task[];
  modelName: string;
  httpPort?: number;
}

function handshake(config: ServerConfig): Handshake {
  return {
    v: PROTOCOL_VERSION,
    capabilities: config.capabilities,
    model: config.modelName,
  };
}

async function handleLine(line: string, config: ServerConfig): Promise<string | null> {
  const trimmed = line.trim();
  if (!trimmed) return null;
  const parsed = parseRequestLine(trimmed);
  if (!parsed.ok) {
    return serialize({ id: -1, error: parsed.error });
  }
  if ("hello" in parsed) {
    return serialize(handshake(config));
  }
  const request = parsed.request;
  if (!config.capabilities.includes(request.task)) {
    return serialize({
      id: request.id,
      error: `unsupported task '${request.task}'`,
    } satisfies ScoreResponse);
  }
  return serialize(await config.scorer.score(request));
}

export async function serveStdio(config: ServerConfig): Promise<void> {
  const reader = createInterface({ input: process.stdin, crlfDelay: Infinity });
  for await (const line of reader) {
    const reply = await handleLine(line, config);
    if (reply !== null) {
      process.stdout.write(reply);
    }
  }
}

export function serveHttp(config: ServerConfig): ReturnType<typeof createServer> {
  const server = createServer((req: IncomingMessage, res: ServerResponse) => {
    if (req.method !== "POST" || req.url !== "/score") {
      res.writeHead(404, { "Content-Type": "application/json" });
      res.end(serialize({ id: -1, error: "POST /score only" }));
      return;
    }
    const chunks: Buffer[] = [];
    req.on("data", (chunk: Buffer) => chunks.push(chunk));
    req.on("end", () => {
      void (async () => {
        const body = Buffer.concat(chunks).toString("utf-8");
        const reply =
          (await handleLine(body, config)) ??
          serialize({ id: -1, error: "empty request body" });
        res.writeHead(200, { "Content-Type": "application/json" });
        res.end(reply);
      })();
    });
  });
  server.listen(config.httpPort);
  return server;
}
