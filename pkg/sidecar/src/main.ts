// Entry point.
//
//   node dist/main.js --mode stub [--stub-script script.json] [--http PORT]
//   node dist/main.js --mode real [--sentiment-model ID] [--emotion-model ID]
//
// Stub mode is fully offline and deterministic. Real mode loads transformer
// text-classification models; capabilities in the handshake reflect what
// actually loaded.

import { exit, argv, stderr } from "node:process";

import { RealScorer } from "./real.js";
import { StubScorer, loadStubScript } from "./stub.js";
import { ServerConfig, serveHttp, serveStdio } from "./server.js";
import { Task } from "./protocol.js";

interface Args {
  mode: "stub" | "real";
  stubScript?: string;
  httpPort?: number;
  sentimentModel?: string;
  emotionModel?: string;
}

function parseArgs(parts: string[]): Args {
  const args: Args = { mode: "stub" };
  for (let i = 0; i < parts.length; i += 1) {
    const flag = parts[i];
    const value = () => {
      i += 1;
      if (i >= parts.length) {
        throw new Error(`flag ${flag} needs a value`);
      }
      return parts[i];
    };
    switch (flag) {
      case "--mode": {
        const mode = value();
        if (mode !== "stub" && mode !== "real") {
          throw new Error(`--mode must be stub or real, got ${mode}`);
        }
        args.mode = mode;
        break;
      }
      case "--stub-script":
        args.stubScript = value();
        break;
      case "--http":
        args.httpPort = Number.parseInt(value(), 10);
        break;
      case "--sentiment-model":
        args.sentimentModel = value();
        break;
      case "--emotion-model":
        args.emotionModel = value();
        break;
      default:
        throw new Error(`unknown flag ${flag}`);
    }
  }
  return args;
}

async function main(): Promise<void> {
  const args = parseArgs(argv.slice(2));
  let config: ServerConfig;
  if (args.mode === "stub") {
    const script = args.stubScript ? loadStubScript(args.stubScript) : {};
    config = {
      scorer: new StubScorer(script),
      capabilities: ["sentiment", "emotion"] as Task[],
      modelName: "stub",
    };
  } else {
    const scorer = await RealScorer.load({
      sentimentModel: args.sentimentModel,
      emotionModel: args.emotionModel,
    });
    for (const problem of scorer.loadErrors) {
      stderr.write(`sidecar: ${problem}\n`);
    }
    const capabilities = scorer.capabilities();
    if (capabilities.length === 0) {
      stderr.write("sidecar: no model loaded; nothing to serve\n");
      exit(1);
    }
    config = {
      scorer,
      capabilities,
      modelName: [args.sentimentModel, args.emotionModel]
        .filter(Boolean)
        .join("+") || "default-transformers",
    };
  }
  if (args.httpPort !== undefined) {
    config.httpPort = args.httpPort;
    serveHttp(config);
    stderr.write(`sidecar: http on port ${args.httpPort}\n`);
  }
  await serveStdio(config);
}

main().catch((error: Error) => {
  stderr.write(`sidecar: fatal: ${error.message}\n`);
  exit(1);
});
