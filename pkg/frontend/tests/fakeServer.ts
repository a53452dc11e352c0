// Replay backend for the tests: serves the responses recorded from a live
// server session (scripts/record_ui_fixtures.py in the repo root) and
// advances through the same phases that session went through.

import { readFileSync } from 'node:fs';
import { fileURLToPath } from 'node:url';
import type { FetchLike } from '../src/api.js';

const FIXTURES = fileURLToPath(new URL('./fixtures/', import.meta.url));

export function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(FIXTURES + name, 'utf8')) as T;
}

export interface Meta {
  reviewer: string;
  accepted_pair: string;
  labeled_ids: string[];
  labeled_pair: string;
  labeled_rule: { tool: string; rule_id: string };
}

type Phase = 'initial' | 'accepted' | 'l1' | 'l2' | 'l3';

interface PhaseFiles {
  candidates: string;
  inconsistencies: string;
  progress: string;
  report: string;
}

const PHASES: Record<Phase, PhaseFiles> = {
  initial: {
    candidates: 'initial/candidates.json',
    inconsistencies: 'initial/inconsistencies.json',
    progress: 'initial/progress.json',
    report: 'initial/report.json',
  },
  accepted: {
    candidates: 'after_accept/candidates_pending.json',
    inconsistencies: 'initial/inconsistencies.json',
    progress: 'after_accept/progress.json',
    report: 'after_accept/report.json',
  },
  l1: {
    candidates: 'after_accept/candidates_pending.json',
    inconsistencies: 'labels/step1/inconsistencies.json',
    progress: 'labels/step1/progress.json',
    report: 'labels/step1/report.json',
  },
  l2: {
    candidates: 'after_accept/candidates_pending.json',
    inconsistencies: 'labels/step2/inconsistencies.json',
    progress: 'labels/step2/progress.json',
    report: 'labels/step2/report.json',
  },
  l3: {
    candidates: 'after_accept/candidates_pending.json',
    inconsistencies: 'labels/step3/inconsistencies.json',
    progress: 'labels/step3/progress.json',
    report: 'labels/step3/report.json',
  },
};

export interface LoggedRequest {
  method: string;
  path: string;
  body?: unknown;
}

export class FakeBackend {
  phase: Phase = 'initial';
  labelStep = 0;
  down = false;
  readonly meta = fixture<Meta>('meta.json');
  readonly requests: LoggedRequest[] = [];

  private json(obj: unknown, status = 200): Response {
    return new Response(JSON.stringify(obj), {
      status,
      headers: { 'Content-Type': 'application/json' },
    });
  }

  private notFound(message: string): Response {
    return this.json({ error: { code: 'not_found', message, fields: [] } }, 404);
  }

  readonly fetch: FetchLike = async (url, init) => {
    if (this.down) throw new TypeError('fetch failed');
    const u = new URL(url, 'http://fake');
    const method = init?.method ?? 'GET';
    const body = init?.body ? JSON.parse(String(init.body)) : undefined;
    this.requests.push({ method, path: u.pathname + u.search, body });
    const files = PHASES[this.phase];

    if (method === 'GET') {
      if (u.pathname === '/health') return this.json(fixture('health.json'));
      if (u.pathname === '/patterns') return this.json(fixture('patterns.json'));
      if (u.pathname === '/candidates') return this.json(fixture(files.candidates));
      if (u.pathname === '/progress') return this.json(fixture(files.progress));
      if (u.pathname === '/report') return this.json(fixture(files.report));
      if (u.pathname === '/inconsistencies') {
        const pair = u.searchParams.get('pair');
        if (pair !== null) {
          if (this.phase !== 'l3' || pair !== this.meta.labeled_pair) {
            throw new Error(`no recording for pair filter ${pair} in ${this.phase}`);
          }
          return this.json(fixture('after_labels/inconsistencies_pair.json'));
        }
        return this.json(fixture(files.inconsistencies));
      }
      return this.notFound(`no route ${u.pathname}`);
    }

    const verdictMatch = u.pathname.match(/^\/candidates\/(.+)\/verdict$/);
    if (verdictMatch) {
      const id = verdictMatch[1];
      if (id !== this.meta.accepted_pair) return this.notFound(`unknown candidate '${id}'`);
      if (this.phase === 'initial') {
        this.phase = 'accepted';
        return this.json(fixture('accept/response.json'));
      }
      // the recorded duplicate click: one more log row, same state
      return this.json(fixture('accept/response_dup.json'));
    }

    const labelMatch = u.pathname.match(/^\/inconsistencies\/(.+)\/label$/);
    if (labelMatch) {
      const id = labelMatch[1];
      const expected = this.meta.labeled_ids[this.labelStep];
      if (id !== expected) {
        throw new Error(`recorded session labels ${expected} next, got ${id}`);
      }
      this.labelStep += 1;
      this.phase = `l${this.labelStep}` as Phase;
      return this.json(fixture<unknown[]>('labels/responses.json')[this.labelStep - 1]);
    }

    return this.notFound(`no route ${u.pathname}`);
  };
}
