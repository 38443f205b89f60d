// Optional backend, installed only where the transformers runtime is
// wanted; typed as any so the default build stays offline.
declare module "@xenova/transformers" {
  export function pipeline(task: string, model: string): Promise<any>;
}
