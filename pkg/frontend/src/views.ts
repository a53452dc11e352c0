// Render functions. Each one returns an HTML string built only from API
// payloads; no domain quantity is computed here beyond formatting.

import type {
  Candidate,
  FindingCategory,
  FindingRow,
  Inconsistency,
  Pattern,
  Progress,
  Report,
  RuleDetail,
  RuleRef,
} from './types.js';
import { INC_VERDICTS } from './types.js';
import type { Draft } from './state.js';

export function esc(text: string): string {
  return text
    .replaceAll('&', '&amp;')
    .replaceAll('<', '&lt;')
    .replaceAll('>', '&gt;')
    .replaceAll('"', '&quot;');
}

const fmt = (x: number) => x.toFixed(3);

export function renderBanner(message: string | null): string {
  if (message === null) return '';
  return `<div class="banner" role="alert">${esc(message)} <button data-action="retry">retry</button></div>`;
}

export function renderProgress(progress: Progress | null): string {
  if (!progress) return '<div class="progress">loading...</div>';
  const p = progress.pairs;
  const i = progress.inconsistencies;
  const reviewed = p.total - p.pending;
  const width = p.total > 0 ? Math.round((100 * reviewed) / p.total) : 0;
  return [
    '<div class="progress">',
    `<div class="bar"><span style="width:${width}%"></span></div>`,
    `<span class="counts">pairs: ${p.pending} pending, ${p.confirmed} confirmed, `,
    `${p.rejected} rejected, ${p.needs_discussion} to discuss</span>`,
    `<span class="counts">inconsistencies: ${i.open} open, ${i.labeled} labeled `,
    `(${i.bug} bug, ${i.not_a_bug} not a bug)</span>`,
    '</div>',
  ].join('');
}

function renderRulePanel(ref: RuleRef, detail: RuleDetail | undefined): string {
  const head = `<h3>${esc(ref.tool)}: ${esc(ref.rule_id)}</h3>`;
  if (!detail) {
    return `<section class="rule">${head}<p class="muted">no catalog loaded</p></section>`;
  }
  const examples = detail.code_examples
    .map(
      (ex) =>
        `<figure><figcaption>${esc(ex.kind)}</figcaption><pre>${esc(ex.source_text)}</pre></figure>`,
    )
    .join('');
  return [
    '<section class="rule">',
    head,
    `<h4>${esc(detail.title)}</h4>`,
    `<p>${esc(detail.description)}</p>`,
    examples,
    '</section>',
  ].join('');
}

export function renderPairCard(candidate: Candidate): string {
  const s = candidate.scores;
  const scores = [
    `<dt>description</dt><dd>${fmt(s.description_sim)}</dd>`,
    `<dt>terms</dt><dd>${fmt(s.term_sim)}</dd>`,
    `<dt>semantic</dt><dd>${fmt(s.semt_sim)}</dd>`,
    `<dt>code</dt><dd>${fmt(s.code_sim)}</dd>`,
  ].join('');
  const o = candidate.overlap;
  const files = o && o.file_jaccard !== null ? `, files ${fmt(o.file_jaccard)}` : '';
  const overlap = o
    ? `<p class="overlap">overlap a=${fmt(o.ratio_a)} b=${fmt(o.ratio_b)}, ` +
      `triggers ${o.trigger_a}/${o.trigger_b}${files}</p>`
    : '';
  const samples = (candidate.sample_shared_warnings ?? [])
    .slice(0, 5)
    .map((w) => `<li>${esc(w.project)}/${esc(w.file)}:${w.line}</li>`)
    .join('');
  return [
    `<article class="pair" data-id="${esc(candidate.id)}">`,
    '<div class="side-by-side">',
    renderRulePanel(candidate.rule_a, candidate.rule_a_detail),
    renderRulePanel(candidate.rule_b, candidate.rule_b_detail),
    '</div>',
    `<dl class="scores">${scores}</dl>`,
    overlap,
    samples ? `<ul class="samples">${samples}</ul>` : '',
    '<div class="actions">',
    `<button data-action="accept" data-id="${esc(candidate.id)}">accept (a)</button>`,
    `<button data-action="reject" data-id="${esc(candidate.id)}">reject (r)</button>`,
    '</div>',
    '</article>',
  ].join('');
}

export function renderPairQueue(pending: Candidate[], current: Candidate | null): string {
  if (pending.length === 0 || current === null) {
    return '<div class="queue"><p class="done">0 pending, all pairs reviewed</p></div>';
  }
  return [
    '<div class="queue">',
    `<p>${pending.length} pending</p>`,
    renderPairCard(current),
    '</div>',
  ].join('');
}

function renderLocation(inc: Inconsistency): string {
  if (inc.criterion === 'line' && inc.location.line !== undefined) {
    return `${esc(inc.file)}:${inc.location.line}`;
  }
  const m = inc.location.method;
  if (m) return `${esc(inc.file)} ${esc(m.name)}() lines ${m.start}-${m.end}`;
  return esc(inc.file);
}

export function renderContext(context: string[] | null): string {
  if (!context || context.length === 0) {
    return '<p class="muted">no source snapshot configured</p>';
  }
  return `<pre class="context">${esc(context.join('\n'))}</pre>`;
}

export function renderTriageForm(
  inc: Inconsistency,
  draft: Draft,
  patterns: Pattern[],
  problem: string | null,
): string {
  const categories = INC_VERDICTS.map(
    (v) =>
      `<label><input type="radio" name="verdict" value="${v.value}"` +
      `${draft.verdict === v.value ? ' checked' : ''}> ${esc(v.label)}</label>`,
  ).join('');
  const options = ['<option value="">(no pattern)</option>']
    .concat(
      patterns.map(
        (p) =>
          `<option value="${esc(p.id)}"${draft.pattern === p.id ? ' selected' : ''}>` +
          `${esc(p.id)}: ${esc(p.label)}</option>`,
      ),
    )
    .join('');
  return [
    `<form class="triage" data-id="${esc(inc.id)}">`,
    `<fieldset class="categories">${categories}</fieldset>`,
    `<select name="pattern">${options}</select>`,
    `<input name="note" placeholder="note" value="${esc(draft.note)}">`,
    problem ? `<p class="invalid">${esc(problem)}</p>` : '',
    `<button data-action="label" data-id="${esc(inc.id)}">submit (enter)</button>`,
    '</form>',
  ].join('');
}

export function renderInconsistencyCard(
  inc: Inconsistency,
  draft: Draft,
  patterns: Pattern[],
  problem: string | null = null,
): string {
  const side = inc.warned_by === 'side_a_only' ? inc.rule_a : inc.rule_b;
  const warned = `${esc(side.tool)}:${esc(side.rule_id)} warned, the other side stayed silent`;
  const label = inc.label
    ? `<p class="label">labeled ${esc(inc.label.verdict)}` +
      `${inc.label.pattern ? ` / ${esc(inc.label.pattern)}` : ''}</p>`
    : '';
  return [
    `<article class="inconsistency" data-id="${esc(inc.id)}">`,
    `<h3>${renderLocation(inc)}</h3>`,
    `<p class="warned">${warned}</p>`,
    `<p class="pair-ref">pair ${esc(inc.pair_id)}: ${esc(inc.rule_a.tool)}:${esc(inc.rule_a.rule_id)}` +
      ` vs ${esc(inc.rule_b.tool)}:${esc(inc.rule_b.rule_id)}</p>`,
    renderContext(inc.context),
    label || renderTriageForm(inc, draft, patterns, problem),
    '</article>',
  ].join('');
}

function renderFindingsTable(category: FindingCategory, rows: FindingRow[]): string {
  const titles: Record<FindingCategory, string> = {
    FN_implementation: 'False negatives (rule implementation)',
    FN_definition: 'False negatives (rule definition)',
    FP: 'False positives',
  };
  if (rows.length === 0) {
    return `<section class="findings"><h3>${titles[category]}</h3><p class="muted">none yet</p></section>`;
  }
  const body = rows
    .map(
      (row) =>
        `<tr><td>${esc(row.tool)}</td><td>${esc(row.rule_id)}</td>` +
        `<td>${esc(row.pattern)}: ${esc(row.pattern_label)}</td>` +
        `<td class="count">${row.occurrences}</td><td>${esc(row.status)}</td></tr>`,
    )
    .join('');
  return [
    `<section class="findings"><h3>${titles[category]}</h3>`,
    '<table><thead><tr><th>tool</th><th>rule</th><th>pattern</th><th>count</th><th>status</th></tr></thead>',
    `<tbody>${body}</tbody></table></section>`,
  ].join('');
}

export function renderDashboard(report: Report | null): string {
  if (!report) return '<div class="dashboard">loading...</div>';
  const tables = (['FN_implementation', 'FN_definition', 'FP'] as FindingCategory[])
    .map((cat) => renderFindingsTable(cat, report.findings[cat]))
    .join('');
  const toolRows = Object.entries(report.by_tool)
    .map(
      ([tool, counts]) =>
        `<tr><td>${esc(tool)}</td><td>${counts.FN_implementation}</td>` +
        `<td>${counts.FN_definition}</td><td>${counts.FP}</td><td>${counts.overall}</td></tr>`,
    )
    .join('');
  const byTool = toolRows
    ? '<section class="by-tool"><h3>Findings per tool</h3>' +
      '<table><thead><tr><th>tool</th><th>FN impl</th><th>FN def</th><th>FP</th><th>all</th></tr></thead>' +
      `<tbody>${toolRows}</tbody></table></section>`
    : '';
  return [
    '<div class="dashboard">',
    `<p class="confirmed">confirmed pairs: ${report.confirmed_pairs.length}</p>`,
    renderProgress(report.funnel),
    tables,
    byTool,
    '</div>',
  ].join('');
}
