/* tslint:disable */
/* eslint-disable */

/**
 * Probability of measuring an improving policy after `j = 0..=max_rotations`
 * Grover rotations on the deterministic bandit, for a threshold value.
 */
export function amplification_curve(policies: number, threshold: number, max_rotations: number): string;

/**
 * Phase-estimation outcome distribution for one bandit policy.
 */
export function qpe_distribution(p0_left: number, p0_right: number, policy_left: number, horizon: number, epsilon: number, delta: number): string;

/**
 * One run of quantum policy iteration from the worst policy.
 */
export function qpi_trace(policies: number, patience: number, lambda: number, seed: bigint): string;

export function version(): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly amplification_curve: (a: number, b: number, c: number) => [number, number, number, number];
    readonly qpe_distribution: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly qpi_trace: (a: number, b: number, c: number, d: bigint) => [number, number, number, number];
    readonly version: () => [number, number];
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
