/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const commutant_dim: (a: number, b: number) => [number, number];
export const counterexample_curves: (a: number) => [number, number];
export const fixture_names: () => [number, number];
export const rn_explore: (a: number, b: number, c: number, d: number, e: number) => [number, number];
export const t_family: (a: number, b: number, c: number, d: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
