/* tslint:disable */
/* eslint-disable */

export class PointEvaluation {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * CHSH value of `P(s, t)`.
     */
    chsh: number;
    local: boolean;
    /**
     * Negativity of the dephased `|++>` state at `(p, q) = (s, t)`, when both lie in `[0, 1]`.
     */
    negativity: number;
    npa1: boolean;
    npa2: boolean;
    ns: boolean;
    region: number;
}

/**
 * Region codes on an `n x n` grid over `(s, t)`, `s` as the slow index.
 */
export function cross_section_regions(n: number): Uint8Array;

export function evaluate_point(s: number, t: number): PointEvaluation;

/**
 * Negativity on an `n x n` grid, flattened with `p` as the slow index.
 */
export function negativity_grid(n: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_get_pointevaluation_chsh: (a: number) => number;
    readonly __wbg_get_pointevaluation_local: (a: number) => number;
    readonly __wbg_get_pointevaluation_negativity: (a: number) => number;
    readonly __wbg_get_pointevaluation_npa1: (a: number) => number;
    readonly __wbg_get_pointevaluation_npa2: (a: number) => number;
    readonly __wbg_get_pointevaluation_ns: (a: number) => number;
    readonly __wbg_get_pointevaluation_region: (a: number) => number;
    readonly __wbg_pointevaluation_free: (a: number, b: number) => void;
    readonly __wbg_set_pointevaluation_chsh: (a: number, b: number) => void;
    readonly __wbg_set_pointevaluation_local: (a: number, b: number) => void;
    readonly __wbg_set_pointevaluation_negativity: (a: number, b: number) => void;
    readonly __wbg_set_pointevaluation_npa1: (a: number, b: number) => void;
    readonly __wbg_set_pointevaluation_npa2: (a: number, b: number) => void;
    readonly __wbg_set_pointevaluation_ns: (a: number, b: number) => void;
    readonly __wbg_set_pointevaluation_region: (a: number, b: number) => void;
    readonly cross_section_regions: (a: number) => [number, number, number, number];
    readonly evaluate_point: (a: number, b: number) => [number, number, number];
    readonly negativity_grid: (a: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
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
