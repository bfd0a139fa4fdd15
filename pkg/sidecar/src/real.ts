// Transformer-backed scorers. Loaded lazily so stub mode never touches the
// optional dependency or the network; a model that fails to load simply
// drops its capability from the handshake.

import {
  EMOTION_LABELS,
  EmotionLabel,
  ScoreRequest,
  ScoreResponse,
  normalizeScores,
} from "./protocol.js";

export const DEFAULT_SENTIMENT_MODEL = "tblard/tf-allocine";
export const DEFAULT_EMOTION_MODEL = "bhadresh-savani/bert-base-uncased-emotion";

// Rough proxy for the 512-token encoder limit; longer inputs are truncated
// by the pipeline and flagged in the response.
const TRUNCATION_CHAR_LIMIT = 2000;

type Pipeline = (
  text: string,
  options?: Record<string, unknown>,
) => Promise<Array<{ label: string; score: number }>>;

export interface RealScorerOptions {
  sentimentModel?: string;
  emotionModel?: string;
}

export class RealScorer {
  private sentiment: Pipeline | null = null;
  private emotion: Pipeline | null = null;
  readonly loadErrors: string[] = [];

  private constructor(private readonly options: RealScorerOptions) {}

  static async load(options: RealScorerOptions = {}): Promise<RealScorer> {
    const scorer = new RealScorer(options);
    let pipelineFactory: (task: string, model: string) => Promise<unknown>;
    try {
      const transformers = await import("@huggingface/transformers");
      pipelineFactory = transformers.pipeline as typeof pipelineFactory;
    } catch (error) {
      scorer.loadErrors.push(
        `transformers runtime unavailable: ${(error as Error).message}`,
      );
      return scorer;
    }
    const sentimentModel = options.sentimentModel ?? DEFAULT_SENTIMENT_MODEL;
    const emotionModel = options.emotionModel ?? DEFAULT_EMOTION_MODEL;
    try {
      scorer.sentiment = (await pipelineFactory(
        "text-classification",
        sentimentModel,
      )) as Pipeline;
    } catch (error) {
      scorer.loadErrors.push(
        `sentiment model ${sentimentModel}: ${(error as Error).message}`,
      );
    }
    try {
      scorer.emotion = (await pipelineFactory(
        "text-classification",
        emotionModel,
      )) as Pipeline;
    } catch (error) {
      scorer.loadErrors.push(
        `emotion model ${emotionModel}: ${(error as Error).message}`,
      );
    }
    return scorer;
  }

  capabilities(): Array<"sentiment" | "emotion"> {
    const out: Array<"sentiment" | "emotion"> = [];
    if (this.sentiment) out.push("sentiment");
    if (this.emotion) out.push("emotion");
    return out;
  }

  async score(request: ScoreRequest): Promise<ScoreResponse> {
    const truncated = request.text.length > TRUNCATION_CHAR_LIMIT;
    try {
      if (request.task === "sentiment") {
        if (!this.sentiment) {
          return { id: request.id, error: "sentiment model not loaded" };
        }
        const ranked = await this.sentiment(request.text, {
          top_k: null,
          truncation: true,
        });
        const positive = ranked.find((r) => /pos/i.test(r.label));
        if (!positive) {
          return { id: request.id, error: "model emitted no positive-class score" };
        }
        const response: ScoreResponse = { id: request.id, valence: positive.score };
        if (truncated) response.truncated = true;
        return response;
      }
      if (!this.emotion) {
        return { id: request.id, error: "emotion model not loaded" };
      }
      const ranked = await this.emotion(request.text, {
        top_k: null,
        truncation: true,
      });
      const scores = {} as Record<EmotionLabel, number>;
      for (const label of EMOTION_LABELS) scores[label] = 0;
      for (const row of ranked) {
        const label = row.label.toLowerCase() as EmotionLabel;
        if ((EMOTION_LABELS as readonly string[]).includes(label)) {
          scores[label] = row.score;
        }
      }
      const response: ScoreResponse = {
        id: request.id,
        scores: normalizeScores(scores),
      };
      if (truncated) response.truncated = true;
      return response;
    } catch (error) {
      return { id: request.id, error: (error as Error).message };
    }
  }
}
