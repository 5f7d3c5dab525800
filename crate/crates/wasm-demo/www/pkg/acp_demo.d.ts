/* tslint:disable */
/* eslint-disable */

export function commutant_dim(name: string): string;

/**
 * `φ(n)` and `φ(−n)` of the integer-group quadruple for `|n| ≤ range`.
 */
export function counterexample_curves(range: number): string;

export function fixture_names(): string;

/**
 * Builds `T₀ = Σ w_k B_k² + shift·I` in the commutant of the fixture's
 * minimal dilation, forms `ψ = φ_{T₀}` and recovers `T₀` from `ψ`.
 */
export function rn_explore(name: string, weights: Float64Array, shift: number): string;

/**
 * Gram spectrum and verdict of `φ = (1, t, t)` on Z₃ for `steps + 1` values of `t`.
 */
export function t_family(alpha_inverse: boolean, t_min: number, t_max: number, steps: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly commutant_dim: (a: number, b: number) => [number, number];
    readonly counterexample_curves: (a: number) => [number, number];
    readonly fixture_names: () => [number, number];
    readonly rn_explore: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly t_family: (a: number, b: number, c: number, d: number) => [number, number];
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
