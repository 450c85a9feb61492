/** Minimal observable store; UI state is a pure projection of server responses. */

import type { HypothesisRow, MapLayout, PromptInfo, SummaryTable } from './api.js';

export interface UiSessionState {
  sessionId: string | null;
  prompt: PromptInfo | null;
  phase: string;
  /** layout of the last acknowledged answer; never optimistic */
  layout: MapLayout | null;
  mapId: string | null;
  hypotheses: HypothesisRow[];
  summary: SummaryTable | null;
  prioritized: boolean;
  selectedEdge: string | null;
  warnings: string[];
  error: string | null;
}

export const initialState: UiSessionState = {
  sessionId: null,
  prompt: null,
  phase: 'naming',
  layout: null,
  mapId: null,
  hypotheses: [],
  summary: null,
  prioritized: false,
  selectedEdge: null,
  warnings: [],
  error: null,
};

export interface Store<T> {
  get(): T;
  set(partial: Partial<T>): void;
  subscribe(listener: (state: T) => void): () => void;
}

export function createStore<T>(initial: T): Store<T> {
  let state = initial;
  const listeners = new Set<(state: T) => void>();
  return {
    get: () => state,
    set(partial: Partial<T>) {
      state = { ...state, ...partial };
      listeners.forEach((fn) => fn(state));
    },
    subscribe(listener: (state: T) => void) {
      listeners.add(listener);
      return () => listeners.delete(listener);
    },
  };
}
