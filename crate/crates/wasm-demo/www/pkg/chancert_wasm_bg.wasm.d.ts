/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_get_pointevaluation_chsh: (a: number) => number;
export const __wbg_get_pointevaluation_local: (a: number) => number;
export const __wbg_get_pointevaluation_negativity: (a: number) => number;
export const __wbg_get_pointevaluation_npa1: (a: number) => number;
export const __wbg_get_pointevaluation_npa2: (a: number) => number;
export const __wbg_get_pointevaluation_ns: (a: number) => number;
export const __wbg_get_pointevaluation_region: (a: number) => number;
export const __wbg_pointevaluation_free: (a: number, b: number) => void;
export const __wbg_set_pointevaluation_chsh: (a: number, b: number) => void;
export const __wbg_set_pointevaluation_local: (a: number, b: number) => void;
export const __wbg_set_pointevaluation_negativity: (a: number, b: number) => void;
export const __wbg_set_pointevaluation_npa1: (a: number, b: number) => void;
export const __wbg_set_pointevaluation_npa2: (a: number, b: number) => void;
export const __wbg_set_pointevaluation_ns: (a: number, b: number) => void;
export const __wbg_set_pointevaluation_region: (a: number, b: number) => void;
export const cross_section_regions: (a: number) => [number, number, number, number];
export const evaluate_point: (a: number, b: number) => [number, number, number];
export const negativity_grid: (a: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
