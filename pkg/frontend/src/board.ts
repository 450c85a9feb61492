/** Hypothesis board: status columns, risk chips, evidence editor, summary. */

import type { HypothesisRow, SummaryTable } from './api.js';
import type { Store, UiSessionState } from './store.js';

const STATUS_COLUMNS: [string, string][] = [
  ['unassessed', 'Unassessed'],
  ['validated', 'Validated'],
  ['not_validated', 'Not validated'],
  ['refuted', 'Refuted'],
];

const EVIDENCE_SOURCES = [
  'own_experience',
  'offline_survey',
  'online_survey',
  'similar_tools',
  'resembling_business_models',
  'product_usage',
  'interviews',
  'other',
];

export interface BoardHandlers {
  assess(
    hypothesisId: string,
    status: string,
    risk: string | null,
    evidenceSource: string | null,
    note: string,
  ): Promise<void>;
  togglePrioritized(on: boolean): Promise<void>;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  if (text !== undefined) node.textContent = text;
  return node;
}

function riskChip(risk: string | null): HTMLElement {
  const letter = risk ? { low: 'L', medium: 'M', high: 'H' }[risk] ?? '?' : '-';
  return el('span', { class: `risk-chip risk-${risk ?? 'none'}` }, letter);
}

function card(hyp: HypothesisRow, handlers: BoardHandlers): HTMLElement {
  const box = el('div', { class: `hypothesis-card kind-${hyp.kind}` });
  box.dataset.hypId = hyp.id;
  const head = el('div', { class: 'card-head' });
  head.appendChild(el('span', { class: `kind-badge kind-${hyp.kind}` }, hyp.kind));
  head.appendChild(riskChip(hyp.risk));
  if (hyp.stale) head.appendChild(el('span', { class: 'stale' }, 'stale'));
  box.appendChild(head);
  box.appendChild(
    el('p', { class: 'statement' }, hyp.edited_text ?? hyp.generated_text),
  );

  const editor = el('details', { class: 'assess-editor' });
  editor.appendChild(el('summary', {}, 'assess'));
  const status = el('select', { class: 'assess-status' });
  for (const [value] of STATUS_COLUMNS.slice(1)) {
    status.appendChild(el('option', { value }, value));
  }
  const risk = el('select', { class: 'assess-risk' });
  risk.appendChild(el('option', { value: '' }, 'risk?'));
  for (const value of ['low', 'medium', 'high']) {
    risk.appendChild(el('option', { value }, value));
  }
  const evidence = el('select', { class: 'assess-evidence' });
  evidence.appendChild(el('option', { value: '' }, 'evidence?'));
  for (const source of EVIDENCE_SOURCES) {
    evidence.appendChild(el('option', { value: source }, source));
  }
  const note = el('input', { class: 'assess-note', type: 'text', placeholder: 'note' });
  const error = el('p', { class: 'assess-error error' });
  const save = el('button', { class: 'assess-save', type: 'button' }, 'Save');
  save.addEventListener('click', () => {
    error.textContent = '';
    handlers
      .assess(hyp.id, status.value, risk.value || null, evidence.value || null,
              note.value)
      .catch((exc: Error) => {
        error.textContent = exc.message;
      });
  });
  editor.append(status, risk, evidence, note, save, error);
  box.appendChild(editor);
  return box;
}

function summaryTable(summary: SummaryTable): HTMLElement {
  const table = el('table', { id: 'summary-table', class: 'summary' });
  const head = el('tr');
  head.appendChild(el('th', {}, ''));
  for (const kind of ['problem', 'value', 'product']) {
    for (const col of ['L', 'M', 'H', 'Total']) {
      head.appendChild(el('th', { class: `col-${kind}` }, `${kind} ${col}`));
    }
  }
  table.appendChild(head);
  const rows: [string, string][] = [
    ['Validated', 'validated'],
    ['Not validated', 'not_validated'],
  ];
  for (const [title, status] of rows) {
    const tr = el('tr', { 'data-row': status });
    tr.appendChild(el('th', {}, title));
    for (const kind of ['problem', 'value', 'product']) {
      const bucket = summary.cells[kind][status];
      for (const risk of ['low', 'medium', 'high', 'total'] as const) {
        tr.appendChild(
          el('td', { 'data-cell': `${kind}.${status}.${risk}` },
             String(bucket[risk])),
        );
      }
    }
    table.appendChild(tr);
  }
  const unassessed = el('tr', { 'data-row': 'unassessed' });
  unassessed.appendChild(el('th', {}, 'Unassessed'));
  for (const kind of ['problem', 'value', 'product']) {
    const cell = el('td', {
      'data-cell': `${kind}.unassessed`,
      colspan: '4',
    }, String(summary.unassessed[kind]));
    unassessed.appendChild(cell);
  }
  table.appendChild(unassessed);
  return table;
}

export function renderBoard(
  root: HTMLElement,
  store: Store<UiSessionState>,
  handlers: BoardHandlers,
): void {
  const state = store.get();
  root.innerHTML = '';
  if (!state.mapId) {
    root.appendChild(
      el('p', {}, 'Hypotheses appear here once the session finishes.'),
    );
    return;
  }

  const controls = el('div', { class: 'board-controls' });
  const toggle = el('button', { id: 'btn-prioritized', type: 'button' },
                    state.prioritized ? 'Show map order' : 'Show experiment order');
  toggle.addEventListener('click', () => {
    void handlers.togglePrioritized(!state.prioritized);
  });
  controls.appendChild(toggle);
  root.appendChild(controls);

  const columns = el('div', { class: 'board-columns' });
  for (const [status, title] of STATUS_COLUMNS) {
    const column = el('div', { class: 'board-column' });
    column.dataset.status = status;
    column.appendChild(el('h3', {}, title));
    for (const hyp of state.hypotheses) {
      if (hyp.status === status) column.appendChild(card(hyp, handlers));
    }
    columns.appendChild(column);
  }
  root.appendChild(columns);

  if (state.summary) {
    root.appendChild(el('h3', {}, 'Founder assessment summary'));
    root.appendChild(summaryTable(state.summary));
  }
}
