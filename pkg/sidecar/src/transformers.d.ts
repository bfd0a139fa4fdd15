// Ambient declaration for the optional transformer runtime; real mode
// resolves it dynamically and degrades gracefully when it is absent.
declare module "@huggingface/transformers" {
  export function pipeline(task: string, model?: string): Promise<unknown>;
}
