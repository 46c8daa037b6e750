/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const clock_spectrum: (a: number, b: number) => [number, number, number, number];
export const qpe_histogram: (a: number, b: bigint, c: number) => [number, number, number, number];
export const soundness_curve: (a: number, b: number, c: number, d: bigint, e: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
