/* tslint:disable */
/* eslint-disable */

/**
 * Recognizer output rewritten by the post-corrector. The models are
 * trained on first use.
 */
export function correct(text: string): string;

/**
 * Cities and tracks of the bundled map, as JSON.
 */
export function map_json(): string;

/**
 * Speech acts found in `text`, as JSON.
 */
export function parse(text: string): string;

/**
 * Plans a route; `via` is a comma-separated list. Returns JSON with either
 * `path` and `hours` or `error` (and a `partial` path when one exists).
 */
export function plan(from: string, to: string, via: string, seed: bigint): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly correct: (a: number, b: number) => [number, number];
    readonly map_json: () => [number, number];
    readonly parse: (a: number, b: number) => [number, number];
    readonly plan: (a: number, b: number, c: number, d: number, e: number, f: number, g: bigint) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
