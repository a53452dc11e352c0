// Review session state: the queues, draft verdicts, and submit flow.
// Everything displayed comes from the last API payloads stored here;
// the only client-side logic is queue position and draft bookkeeping.

import { ApiError, ReviewApi } from './api.js';
import type {
  Candidate,
  Inconsistency,
  IncVerdict,
  PairVerdict,
  Pattern,
  Progress,
  Report,
} from './types.js';

export interface Draft {
  verdict: IncVerdict | null;
  pattern: string | null;
  note: string;
}

export type SubmitResult = 'done' | 'duplicate' | 'invalid' | 'failed';

// Pattern without a category is the one combination the form can produce
// that the server would misread, so it is rejected before the POST.
export function validateDraft(draft: Draft): string | null {
  if (draft.pattern && !draft.verdict) {
    return 'select a category before picking a pattern';
  }
  if (!draft.verdict) {
    return 'select a category';
  }
  return null;
}

export class ReviewSession {
  candidates: Candidate[] = [];
  inconsistencies: Inconsistency[] = [];
  patterns: Pattern[] = [];
  progress: Progress | null = null;
  report: Report | null = null;

  // connection banner; null when the last round trip succeeded
  banner: string | null = null;
  pairCursor = 0;
  incCursor = 0;

  readonly drafts = new Map<string, Draft>();
  private readonly inFlight = new Set<string>();

  constructor(
    readonly api: ReviewApi,
    readonly reviewer: string,
  ) {}

  draftFor(id: string): Draft {
    let draft = this.drafts.get(id);
    if (!draft) {
      draft = { verdict: null, pattern: null, note: '' };
      this.drafts.set(id, draft);
    }
    return draft;
  }

  async load(): Promise<void> {
    try {
      const [patterns, candidates, incs, progress, report] = await Promise.all([
        this.api.patterns(),
        this.api.candidates({ page: 1, size: 50, status: 'pending' }),
        this.api.inconsistencies({ page: 1, size: 50 }),
        this.api.progress(),
        this.api.report(),
      ]);
      this.patterns = patterns.patterns;
      this.candidates = candidates.items;
      this.inconsistencies = incs.items;
      this.progress = progress;
      this.report = report;
      this.banner = null;
    } catch (err) {
      this.banner = this.describe(err);
    }
  }

  async refresh(): Promise<void> {
    await this.load();
  }

  pendingPairs(): Candidate[] {
    return this.candidates.filter((c) => c.status === 'pending');
  }

  openInconsistencies(): Inconsistency[] {
    return this.inconsistencies.filter((i) => i.label === null);
  }

  currentPair(): Candidate | null {
    const pending = this.pendingPairs();
    if (pending.length === 0) return null;
    return pending[Math.min(this.pairCursor, pending.length - 1)];
  }

  currentInconsistency(): Inconsistency | null {
    const open = this.openInconsistencies();
    if (open.length === 0) return null;
    return open[Math.min(this.incCursor, open.length - 1)];
  }

  advancePair(): void {
    const pending = this.pendingPairs();
    if (pending.length > 0) this.pairCursor = (this.pairCursor + 1) % pending.length;
  }

  advanceInconsistency(): void {
    const open = this.openInconsistencies();
    if (open.length > 0) this.incCursor = (this.incCursor + 1) % open.length;
  }

  // Accept or reject a candidate pair. A click while the same subject is
  // already in flight is dropped, so double clicks produce one verdict.
  async submitPairVerdict(id: string, verdict: PairVerdict): Promise<SubmitResult> {
    if (this.inFlight.has(id)) return 'duplicate';
    this.inFlight.add(id);
    try {
      await this.api.submitPairVerdict(id, { reviewer: this.reviewer, verdict });
      this.drafts.delete(id);
      await this.refresh();
      return this.banner === null ? 'done' : 'failed';
    } catch (err) {
      this.banner = this.describe(err);
      return 'failed';
    } finally {
      this.inFlight.delete(id);
    }
  }

  // Label an inconsistency from its draft. The draft survives a failed
  // submit so nothing typed is lost while the API is unreachable.
  async submitLabel(id: string): Promise<SubmitResult> {
    const draft = this.draftFor(id);
    if (validateDraft(draft) !== null) return 'invalid';
    if (this.inFlight.has(id)) return 'duplicate';
    this.inFlight.add(id);
    try {
      await this.api.submitLabel(id, {
        reviewer: this.reviewer,
        verdict: draft.verdict as string,
        pattern: draft.pattern,
        note: draft.note,
      });
      this.drafts.delete(id);
      await this.refresh();
      return this.banner === null ? 'done' : 'failed';
    } catch (err) {
      this.banner = this.describe(err);
      return 'failed';
    } finally {
      this.inFlight.delete(id);
    }
  }

  private describe(err: unknown): string {
    if (err instanceof ApiError) {
      return err.offline
        ? `API unreachable, retrying keeps your drafts: ${err.message}`
        : `request failed (${err.status}): ${err.message}`;
    }
    return String(err);
  }
}
