/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const correct: (a: number, b: number) => [number, number];
export const map_json: () => [number, number];
export const parse: (a: number, b: number) => [number, number];
export const plan: (a: number, b: number, c: number, d: number, e: number, f: number, g: bigint) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
