/** Wizard pane: renders the current prompt with the matching input widget. */

import type { MapLayout, PromptInfo } from './api.js';
import type { Store, UiSessionState } from './store.js';

export interface WizardHandlers {
  submit(payload: unknown): Promise<void>;
  finish(): Promise<void>;
}

interface ReviewCommand {
  op: string;
  label?: string;
  src?: string;
  dst?: string;
  sign?: string;
  target?: string;
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

function button(id: string, label: string, onClick: () => void): HTMLButtonElement {
  const btn = el('button', { id, type: 'button' }, label);
  btn.addEventListener('click', onClick);
  return btn;
}

function signSelect(id: string, allowNone = false): HTMLSelectElement {
  const select = el('select', { id });
  if (allowNone) select.appendChild(el('option', { value: '' }, 'no sign'));
  select.appendChild(el('option', { value: '+' }, '+ increases'));
  select.appendChild(el('option', { value: '-' }, '- decreases'));
  select.appendChild(el('option', { value: 'o' }, '/o/ does not affect'));
  return select;
}

function labelSelect(id: string, labels: string[]): HTMLSelectElement {
  const select = el('select', { id });
  for (const label of labels) {
    select.appendChild(el('option', { value: label }, label));
  }
  return select;
}

function conceptLabels(layout: MapLayout | null): string[] {
  return (layout?.nodes ?? [])
    .filter((n) => n.kind === 'concept')
    .map((n) => n.label);
}

function skipButton(handlers: WizardHandlers): HTMLButtonElement {
  return button('wizard-skip', 'Skip this phase', () => {
    void handlers.submit({ skip: true });
  });
}

// -- widgets per answer shape -------------------------------------------------

function textWidget(root: HTMLElement, handlers: WizardHandlers): void {
  const input = el('input', { id: 'wizard-input', type: 'text' });
  const submit = button('wizard-submit', 'Submit', () => {
    void handlers.submit(input.value);
  });
  input.addEventListener('keydown', (event) => {
    if (event.key === 'Enter') submit.click();
  });
  root.append(input, submit);
}

function listWidget(root: HTMLElement, handlers: WizardHandlers): void {
  const items: string[] = [];
  const list = el('ul', { id: 'wizard-items', class: 'item-list' });
  const input = el('input', { id: 'wizard-input', type: 'text' });

  const sync = () => {
    list.innerHTML = '';
    items.forEach((item, index) => {
      const li = el('li', {}, item);
      const remove = button(`wizard-remove-${index}`, 'x', () => {
        items.splice(index, 1);
        sync();
      });
      li.appendChild(remove);
      list.appendChild(li);
    });
  };

  const add = button('wizard-add', 'Add', () => {
    if (input.value.trim()) {
      items.push(input.value.trim());
      input.value = '';
      sync();
    }
  });
  input.addEventListener('keydown', (event) => {
    if (event.key === 'Enter') add.click();
  });
  const done = button('wizard-done', 'Done', () => {
    void handlers.submit(items.slice());
  });
  root.append(input, add, list, done, skipButton(handlers));
}

function featureLinksWidget(
  root: HTMLElement,
  layout: MapLayout | null,
  handlers: WizardHandlers,
): void {
  const links: { aspect: string; sign: string }[] = [];
  const aspects = conceptLabels(layout);
  const list = el('ul', { id: 'wizard-items', class: 'item-list' });
  const aspect = labelSelect('link-aspect', aspects);
  const sign = signSelect('link-sign');

  const sync = () => {
    list.innerHTML = '';
    for (const link of links) {
      list.appendChild(el('li', {}, `${link.aspect} (${link.sign})`));
    }
  };
  const add = button('wizard-add', 'Add link', () => {
    if (aspect.value) {
      links.push({ aspect: aspect.value, sign: sign.value });
      sync();
    }
  });
  const done = button('wizard-done', 'Done', () => {
    void handlers.submit(links.slice());
  });
  if (aspects.length === 0) {
    root.appendChild(el('p', {}, 'No aspects on the map yet.'));
  }
  root.append(aspect, sign, add, list, done, skipButton(handlers));
}

function deepeningWidget(
  root: HTMLElement,
  prompt: PromptInfo,
  layout: MapLayout | null,
  handlers: WizardHandlers,
): void {
  const edge = layout?.edges.find((e) => e.id === prompt.subjects[0]);
  const saturate = button('btn-saturated', 'Directly testable as-is', () => {
    void handlers.submit({ saturated: true });
  });
  root.appendChild(saturate);

  if (edge && edge.kind !== 'offering') {
    const signCount = edge.kind === 'influence' ? 2 : 1;
    const box = el('div', { class: 'decompose' });
    box.appendChild(el('p', {}, 'Or explain it through an underlying concept:'));
    const concept = el('input', { id: 'deepen-concept', type: 'text' });
    box.appendChild(concept);
    const signs: HTMLSelectElement[] = [];
    for (let i = 0; i < signCount; i += 1) {
      const select = signSelect(`deepen-sign-${i + 1}`);
      signs.push(select);
      box.appendChild(select);
    }
    box.appendChild(
      button('btn-decompose', 'Explain via concept', () => {
        void handlers.submit({
          concept: concept.value,
          signs: signs.map((s) => s.value),
        });
      }),
    );
    root.appendChild(box);
  }
  root.appendChild(skipButton(handlers));
}

function crossLinkWidget(
  root: HTMLElement,
  prompt: PromptInfo,
  layout: MapLayout | null,
  handlers: WizardHandlers,
): void {
  const subject = layout?.nodes.find((n) => n.id === prompt.subjects[0]);
  const others = conceptLabels(layout).filter((label) => label !== subject?.label);
  const links: { concept: string; sign: string }[] = [];
  const list = el('ul', { id: 'wizard-items', class: 'item-list' });
  const target = labelSelect('crosslink-target', others);
  const sign = signSelect('crosslink-sign');

  const add = button('wizard-add', 'Add relation', () => {
    if (target.value) {
      links.push({ concept: target.value, sign: sign.value });
      list.appendChild(el('li', {}, `${target.value} (${sign.value})`));
    }
  });
  const done = button('wizard-done', 'Done', () => {
    void handlers.submit(links.slice());
  });
  root.append(target, sign, add, list, done, skipButton(handlers));
}

function reviewWidget(
  root: HTMLElement,
  layout: MapLayout | null,
  handlers: WizardHandlers,
): void {
  const commands: ReviewCommand[] = [];
  const queuedAdds: string[] = [];

  root.appendChild(
    button('btn-coherent', 'The map is coherent', () => {
      void handlers.submit({ coherent: true });
    }),
  );

  const editor = el('div', { class: 'review-editor' });
  editor.appendChild(el('p', {}, 'Refine the map: add, remove, or substitute elements.'));

  const queue = el('ul', { id: 'command-queue', class: 'item-list' });
  const syncQueue = () => {
    queue.innerHTML = '';
    for (const cmd of commands) {
      queue.appendChild(el('li', {}, JSON.stringify(cmd)));
    }
  };

  const allLabels = () =>
    (layout?.nodes ?? []).map((n) => n.label).concat(queuedAdds);

  // add element
  const kind = labelSelect('cmd-kind', ['customer', 'feature', 'concept']);
  const label = el('input', { id: 'cmd-label', type: 'text' });
  editor.append(
    kind,
    label,
    button('btn-queue-add', 'Queue add', () => {
      if (!label.value.trim()) return;
      commands.push({ op: `add_${kind.value}`, label: label.value.trim() });
      queuedAdds.push(label.value.trim());
      label.value = '';
      refreshSelects();
      syncQueue();
    }),
  );

  // add relationship
  const src = labelSelect('cmd-src', allLabels());
  const sign = signSelect('cmd-sign', true);
  const dst = labelSelect('cmd-dst', allLabels());
  editor.append(
    src,
    sign,
    dst,
    button('btn-queue-edge', 'Queue relationship', () => {
      const cmd: ReviewCommand = { op: 'add_edge', src: src.value, dst: dst.value };
      if (sign.value) cmd.sign = sign.value;
      commands.push(cmd);
      syncQueue();
    }),
  );

  // remove / rename
  const target = labelSelect('cmd-target', allLabels());
  const renamed = el('input', { id: 'cmd-renamed', type: 'text' });
  editor.append(
    target,
    button('btn-queue-remove', 'Queue remove', () => {
      commands.push({ op: 'remove', target: target.value });
      syncQueue();
    }),
    renamed,
    button('btn-queue-rename', 'Queue rename', () => {
      if (!renamed.value.trim()) return;
      commands.push({ op: 'substitute', target: target.value, label: renamed.value.trim() });
      renamed.value = '';
      syncQueue();
    }),
  );

  function refreshSelects(): void {
    for (const select of [src, dst, target]) {
      const previous = select.value;
      select.innerHTML = '';
      for (const option of allLabels()) {
        select.appendChild(el('option', { value: option }, option));
      }
      if (previous) select.value = previous;
    }
  }

  editor.append(
    queue,
    button('btn-apply-commands', 'Apply changes', () => {
      void handlers.submit({ commands: commands.slice() });
    }),
  );
  root.appendChild(editor);
}

// -- pane ---------------------------------------------------------------------

export function renderWizard(
  root: HTMLElement,
  store: Store<UiSessionState>,
  handlers: WizardHandlers,
): void {
  const state = store.get();
  root.innerHTML = '';

  if (!state.sessionId) {
    root.appendChild(el('p', {}, 'Start a session to begin the interview.'));
    return;
  }

  if (state.mapId) {
    const done = el('div', { class: 'wizard-done' });
    done.appendChild(el('p', { id: 'wizard-finished' }, 'Session finished.'));
    for (const warning of state.warnings) {
      done.appendChild(el('p', { class: 'warning' }, warning));
    }
    root.appendChild(done);
    return;
  }

  const prompt = state.prompt;
  if (!prompt) {
    // review confirmed; only finishing remains
    root.appendChild(
      button('btn-finish', 'Finish session', () => {
        void handlers.finish();
      }),
    );
    return;
  }

  root.appendChild(el('p', { class: 'phase-tag' }, `phase: ${prompt.phase}`));
  const question = el('p', { id: 'wizard-question' }, prompt.text);
  question.dataset.promptId = prompt.id;
  root.appendChild(question);
  const error = el('p', { id: 'wizard-error', class: 'error' });
  if (state.error) error.textContent = state.error;
  root.appendChild(error);

  const widget = el('div', { id: 'wizard-widget' });
  root.appendChild(widget);

  switch (prompt.shape) {
    case 'text':
      textWidget(widget, handlers);
      break;
    case 'text-list':
      listWidget(widget, handlers);
      break;
    case 'edge-annotation':
      if (prompt.phase === 'features') {
        featureLinksWidget(widget, state.layout, handlers);
      } else {
        deepeningWidget(widget, prompt, state.layout, handlers);
      }
      break;
    case 'node-choice':
      crossLinkWidget(widget, prompt, state.layout, handlers);
      break;
    case 'yes/no':
      reviewWidget(widget, state.layout, handlers);
      break;
    default:
      widget.appendChild(el('p', {}, `Unsupported answer shape: ${prompt.shape}`));
  }
}
