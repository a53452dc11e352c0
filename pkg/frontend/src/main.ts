// Browser entry point: mounts the review app and wires events.
// Served by the backend via --ui-dir after `npm run build`.

import { ReviewApi } from './api.js';
import { ReviewSession, validateDraft } from './state.js';
import type { Draft } from './state.js';
import type { IncVerdict } from './types.js';
import {
  renderBanner,
  renderDashboard,
  renderInconsistencyCard,
  renderPairQueue,
  renderProgress,
} from './views.js';

type Tab = 'pairs' | 'triage' | 'dashboard';

const POLL_MS = 5000;

function start(): void {
  const root = document.getElementById('app');
  if (!root) return;

  const api = new ReviewApi('');
  const reviewer =
    new URLSearchParams(window.location.search).get('reviewer') ?? 'reviewer';
  const session = new ReviewSession(api, reviewer);
  let tab: Tab = 'pairs';
  let inlineProblem: string | null = null;

  function render(): void {
    const current = session.currentInconsistency();
    const body =
      tab === 'pairs'
        ? renderPairQueue(session.pendingPairs(), session.currentPair())
        : tab === 'triage'
          ? current
            ? renderInconsistencyCard(
                current,
                session.draftFor(current.id),
                session.patterns,
                inlineProblem,
              )
            : '<p class="done">nothing open to triage</p>'
          : renderDashboard(session.report);
    root!.innerHTML = [
      renderBanner(session.banner),
      '<nav>',
      ...(['pairs', 'triage', 'dashboard'] as Tab[]).map(
        (t) =>
          `<button data-action="tab" data-tab="${t}"${t === tab ? ' class="active"' : ''}>${t}</button>`,
      ),
      '</nav>',
      renderProgress(session.progress),
      `<main>${body}</main>`,
      `<footer>reviewing as ${reviewer}</footer>`,
    ].join('');
  }

  function readDraftFromForm(form: HTMLFormElement, draft: Draft): void {
    const data = new FormData(form);
    const verdict = data.get('verdict');
    draft.verdict = verdict ? (String(verdict) as IncVerdict) : null;
    const pattern = data.get('pattern');
    draft.pattern = pattern ? String(pattern) : null;
    draft.note = String(data.get('note') ?? '');
  }

  async function submitCurrentLabel(): Promise<void> {
    const current = session.currentInconsistency();
    if (!current) return;
    const form = root!.querySelector<HTMLFormElement>(
      `form.triage[data-id="${current.id}"]`,
    );
    const draft = session.draftFor(current.id);
    if (form) readDraftFromForm(form, draft);
    inlineProblem = validateDraft(draft);
    if (inlineProblem === null) {
      await session.submitLabel(current.id);
    }
    render();
  }

  root.addEventListener('click', (event) => {
    const target = (event.target as HTMLElement).closest<HTMLElement>('[data-action]');
    if (!target) return;
    const action = target.dataset.action;
    const id = target.dataset.id ?? '';
    if (action === 'tab') {
      tab = target.dataset.tab as Tab;
      inlineProblem = null;
      render();
    } else if (action === 'accept' || action === 'reject') {
      event.preventDefault();
      void session.submitPairVerdict(id, action).then(render);
    } else if (action === 'label') {
      event.preventDefault();
      void submitCurrentLabel();
    } else if (action === 'retry') {
      void session.refresh().then(render);
    }
  });

  // keyboard shortcuts: a/r verdict, n next, enter submits the triage form
  document.addEventListener('keydown', (event) => {
    if ((event.target as HTMLElement).tagName === 'INPUT') return;
    if (tab === 'pairs') {
      const current = session.currentPair();
      if (!current) return;
      if (event.key === 'a') void session.submitPairVerdict(current.id, 'accept').then(render);
      if (event.key === 'r') void session.submitPairVerdict(current.id, 'reject').then(render);
      if (event.key === 'n') {
        session.advancePair();
        render();
      }
    } else if (tab === 'triage') {
      if (event.key === 'n') {
        session.advanceInconsistency();
        render();
      }
      if (event.key === 'Enter') void submitCurrentLabel();
    }
  });

  void session.load().then(render);
  setInterval(() => {
    void session.api
      .progress()
      .then((progress) => {
        session.progress = progress;
        render();
      })
      .catch(() => {
        // the next user action will surface the banner
      });
  }, POLL_MS);
}

if (typeof document !== 'undefined') start();
