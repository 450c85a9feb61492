/** App bootstrap: wizard pane, map canvas, and hypothesis board side by side. */

import { ApiClient, ApiError } from './api.js';
import { renderBoard } from './board.js';
import { renderCanvas, renderEdgeDetail } from './canvas.js';
import { createStore, initialState, type Store, type UiSessionState } from './store.js';
import { renderWizard } from './wizard.js';

export interface App {
  store: Store<UiSessionState>;
  api: ApiClient;
}

export function initApp(root: HTMLElement, api: ApiClient): App {
  const store = createStore({ ...initialState });

  root.innerHTML = `
    <header class="topbar">
      <h1>HyMap</h1>
      <input id="session-title" type="text" placeholder="session title (optional)">
      <button id="btn-start" type="button">Start session</button>
      <span id="banner" class="error" hidden></span>
    </header>
    <main class="panes">
      <section id="wizard-pane" class="pane"></section>
      <section id="canvas-pane" class="pane">
        <div id="canvas"></div>
        <div id="edge-detail"></div>
      </section>
      <section id="board-pane" class="pane"></section>
    </main>
  `;

  const wizardPane = root.querySelector<HTMLElement>('#wizard-pane')!;
  const canvasPane = root.querySelector<HTMLElement>('#canvas')!;
  const detailPane = root.querySelector<HTMLElement>('#edge-detail')!;
  const boardPane = root.querySelector<HTMLElement>('#board-pane')!;
  const banner = root.querySelector<HTMLElement>('#banner')!;

  async function refreshLayout(): Promise<void> {
    const state = store.get();
    try {
      const layout = state.mapId
        ? await api.mapLayout(state.mapId)
        : await api.sessionLayout();
      store.set({ layout });
    } catch (exc) {
      banner.textContent = `map view unavailable: ${(exc as Error).message}`;
      banner.removeAttribute('hidden');
    }
  }

  async function refreshBoard(): Promise<void> {
    const state = store.get();
    if (!state.mapId) return;
    const [hypotheses, summary] = await Promise.all([
      api.hypotheses(state.mapId, state.prioritized),
      api.summary(state.mapId),
    ]);
    store.set({ hypotheses, summary });
  }

  const wizardHandlers = {
    async submit(payload: unknown): Promise<void> {
      const prompt = store.get().prompt;
      if (!prompt) return;
      try {
        const response = await api.answer(prompt.id, payload);
        store.set({ prompt: response.prompt, phase: response.phase, error: null });
        await refreshLayout();
      } catch (exc) {
        if (exc instanceof ApiError && exc.status === 409) {
          // stale prompt: refetch the current one and move on
          const current = await api.prompt();
          store.set({ prompt: current.prompt, phase: current.phase, error: null });
          return;
        }
        store.set({ error: (exc as Error).message });
      }
    },
    async finish(): Promise<void> {
      try {
        const result = await api.finish();
        store.set({
          mapId: result.map_id,
          prompt: null,
          error: null,
          warnings: result.warnings.map(
            (w) => `${w.code}: ${w.edges.map((e) => e.statement).join('; ')}`,
          ),
        });
        await refreshLayout();
        await refreshBoard();
      } catch (exc) {
        store.set({ error: (exc as Error).message });
      }
    },
  };

  const boardHandlers = {
    async assess(
      hypothesisId: string,
      status: string,
      risk: string | null,
      evidenceSource: string | null,
      note: string,
    ): Promise<void> {
      const mapId = store.get().mapId;
      if (!mapId) return;
      const evidence = evidenceSource ? [{ source: evidenceSource, note }] : [];
      await api.assess(mapId, hypothesisId, status, risk, evidence);
      await refreshBoard();
    },
    async togglePrioritized(on: boolean): Promise<void> {
      store.set({ prioritized: on });
      await refreshBoard();
    },
  };

  root.querySelector<HTMLButtonElement>('#btn-start')!.addEventListener(
    'click',
    () => {
      const title =
        root.querySelector<HTMLInputElement>('#session-title')!.value;
      api
        .startSession(title)
        .then(async (prompt) => {
          store.set({
            ...initialState,
            sessionId: api.currentSession(),
            prompt,
          });
          await refreshLayout();
        })
        .catch((exc: Error) => {
          banner.textContent = exc.message;
          banner.removeAttribute('hidden');
        });
    },
  );

  store.subscribe((state) => {
    renderWizard(wizardPane, store, wizardHandlers);
    renderCanvas(canvasPane, state.layout, {
      onEdgeClick: (edgeId) => store.set({ selectedEdge: edgeId }),
    });
    renderEdgeDetail(detailPane, state.layout, state.selectedEdge);
    renderBoard(boardPane, store, boardHandlers);
  });

  renderWizard(wizardPane, store, wizardHandlers);
  renderCanvas(canvasPane, null, {});
  renderBoard(boardPane, store, boardHandlers);

  // a reload mid-session restores identical state from the server
  if (api.resume()) {
    api
      .prompt()
      .then(async (current) => {
        store.set({
          sessionId: api.currentSession(),
          prompt: current.prompt,
          phase: current.phase,
        });
        await refreshLayout();
      })
      .catch(() => api.forgetSession());
  }

  return { store, api };
}

declare global {
  interface Window {
    HYMAP_API_BASE?: string;
  }
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  const base = window.HYMAP_API_BASE ?? '';
  initApp(document.getElementById('app')!, new ApiClient(base));
}
