// DOM/SVG layer: draws the view models and forwards interactions. All label
// strings are printed verbatim from the models (which carry API values).

import type {
  ArtifactPanelModel,
  MatrixModel,
  WhatIfPanelModel,
  XY,
} from './render.js';
import { SCORE_MAX, SCORE_MIN } from './render.js';

const SVG_NS = 'http://www.w3.org/2000/svg';
const SIZE = 520;
const PAD = 44;

const BAND_FILLS = ['#eef7ee', '#eaf1fa', '#fdf3e3', '#faeaea'];

function toPx(p: XY): XY {
  const scale = (SIZE - 2 * PAD) / (SCORE_MAX - SCORE_MIN);
  return {
    x: PAD + (p.x - SCORE_MIN) * scale,
    y: SIZE - PAD - (p.y - SCORE_MIN) * scale,
  };
}

function fromPx(x: number, y: number): { bi: number; cc: number } {
  const scale = (SIZE - 2 * PAD) / (SCORE_MAX - SCORE_MIN);
  return {
    cc: SCORE_MIN + (x - PAD) / scale,
    bi: SCORE_MIN + (SIZE - PAD - y) / scale,
  };
}

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number>,
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    el.setAttribute(key, String(value));
  }
  return el;
}

export interface MatrixHandlers {
  onSelect(artifactId: string): void;
  onDrag(point: { bi: number; cc: number }): void;
  onDragEnd(): void;
}

export function renderMatrix(root: HTMLElement, model: MatrixModel, handlers: MatrixHandlers): void {
  root.replaceChildren();
  const svg = svgEl('svg', { width: SIZE, height: SIZE, viewBox: `0 0 ${SIZE} ${SIZE}` });
  svg.classList.add('matrix');

  for (const band of model.bands) {
    if (band.polygon.length < 3) continue;
    const points = band.polygon.map((p) => {
      const px = toPx(p);
      return `${px.x},${px.y}`;
    }).join(' ');
    svg.append(svgEl('polygon', {
      points,
      fill: BAND_FILLS[band.index % BAND_FILLS.length]!,
      stroke: 'none',
      'data-band': band.objective,
    }));
  }

  // frame and threshold cross
  const corner0 = toPx({ x: SCORE_MIN, y: SCORE_MIN });
  const corner1 = toPx({ x: SCORE_MAX, y: SCORE_MAX });
  svg.append(svgEl('rect', {
    x: corner1.y, y: corner1.y,
    width: corner0.x > corner1.x ? corner0.x - corner1.x : corner1.x - corner0.x,
    height: corner0.y - corner1.y,
    fill: 'none', stroke: '#444', 'stroke-width': 1.5,
  }));
  const vt = toPx({ x: model.thresholds.vertical, y: SCORE_MIN });
  const vb = toPx({ x: model.thresholds.vertical, y: SCORE_MAX });
  svg.append(svgEl('line', { x1: vt.x, y1: vt.y, x2: vb.x, y2: vb.y, stroke: '#888', 'stroke-dasharray': '6 4' }));
  const hl = toPx({ x: SCORE_MIN, y: model.thresholds.horizontal });
  const hr = toPx({ x: SCORE_MAX, y: model.thresholds.horizontal });
  svg.append(svgEl('line', { x1: hl.x, y1: hl.y, x2: hr.x, y2: hr.y, stroke: '#888', 'stroke-dasharray': '6 4' }));

  // axis captions
  const xCaption = svgEl('text', { x: SIZE / 2, y: SIZE - 8, 'text-anchor': 'middle', class: 'axis' });
  xCaption.textContent = 'control complexity →';
  svg.append(xCaption);
  const yCaption = svgEl('text', {
    x: 14, y: SIZE / 2, 'text-anchor': 'middle', class: 'axis',
    transform: `rotate(-90 14 ${SIZE / 2})`,
  });
  yCaption.textContent = 'business impact →';
  svg.append(yCaption);

  for (const label of model.quadrantLabels) {
    const at = toPx(label.at);
    const text = svgEl('text', {
      x: at.x, y: at.y, 'text-anchor': 'middle', class: 'quadrant-label',
      'data-quadrant-label': label.quadrant,
    });
    text.textContent = label.quadrant;
    svg.append(text);
  }

  for (const point of model.points) {
    const at = toPx({ x: point.cc, y: point.bi });
    const group = svgEl('g', { class: 'artifact-point', 'data-artifact': point.artifactId });
    const dot = svgEl('circle', {
      cx: at.x, cy: at.y, r: point.selected ? 9 : 6,
      fill: point.status === 'finalized' ? '#2a6f2a' : '#3b6ea5',
      stroke: point.flagged ? '#c2571a' : '#222',
      'stroke-width': point.flagged ? 3 : 1,
      'data-quadrant': point.quadrant,
      'data-objective': point.objective,
    });
    if (point.flagged) dot.classList.add('flagged');
    const caption = svgEl('text', { x: at.x + 10, y: at.y - 8, class: 'point-label' });
    caption.textContent = point.artifactId;
    group.append(dot, caption);
    group.addEventListener('pointerdown', (event) => {
      event.preventDefault();
      handlers.onSelect(point.artifactId);
      const move = (ev: PointerEvent) => {
        const rect = svg.getBoundingClientRect();
        handlers.onDrag(fromPx(ev.clientX - rect.left, ev.clientY - rect.top));
      };
      const up = () => {
        window.removeEventListener('pointermove', move);
        window.removeEventListener('pointerup', up);
        handlers.onDragEnd();
      };
      window.addEventListener('pointermove', move);
      window.addEventListener('pointerup', up);
    });
    svg.append(group);
  }

  if (model.whatIf) {
    const at = toPx(model.whatIf.at);
    svg.append(svgEl('circle', {
      cx: at.x, cy: at.y, r: 8, fill: 'none', stroke: '#9222b0',
      'stroke-width': 2, 'stroke-dasharray': '3 3', class: 'what-if-marker',
      'data-quadrant': model.whatIf.quadrant,
      'data-objective': model.whatIf.objective,
    }));
  }

  root.append(svg);
}

function row(label: string, value: string | null, attr?: string): HTMLElement {
  const div = document.createElement('div');
  div.className = 'row';
  const key = document.createElement('span');
  key.className = 'key';
  key.textContent = label;
  const val = document.createElement('span');
  val.className = 'value';
  if (attr) val.dataset.field = attr;
  val.textContent = value ?? '—';
  div.append(key, val);
  return div;
}

export interface PanelHandlers {
  onScore(questionId: string, value: string): void;
  onConsensus(questionId: string, value: string): void;
  onFinalize(): void;
}

export function renderArtifactPanel(
  root: HTMLElement,
  model: ArtifactPanelModel | null,
  handlers: PanelHandlers,
): void {
  root.replaceChildren();
  if (!model) {
    const hint = document.createElement('p');
    hint.className = 'hint';
    hint.textContent = 'Select an artifact on the matrix to score it.';
    root.append(hint);
    return;
  }
  const title = document.createElement('h2');
  title.textContent = model.artifactId;
  const status = document.createElement('span');
  status.className = `status status-${model.status}`;
  status.textContent = model.status;
  title.append(' ', status);
  root.append(title);

  root.append(row('scores', model.scoreLine, 'scores'));
  root.append(row('quadrant', model.quadrant, 'quadrant'));
  root.append(row('objective', model.objective, 'objective'));
  if (model.secondaryObjective) root.append(row('also consider', model.secondaryObjective, 'secondary'));
  root.append(row('policy', model.policy, 'policy'));
  root.append(row('venue', model.venue, 'venue'));
  if (model.flags.length) root.append(row('boundary', model.flags.join(', '), 'flags'));
  if (model.participants.length) root.append(row('participants', model.participants.join(', ')));

  const table = document.createElement('div');
  table.className = 'questions';
  for (const questionRow of model.questionRows) {
    const wrap = document.createElement('div');
    wrap.className = 'question';
    const text = document.createElement('div');
    text.className = 'question-text';
    text.title = questionRow.question.guidance;
    text.textContent = `${questionRow.question.id}. ${questionRow.question.text}`;
    wrap.append(text);

    const bars = document.createElement('div');
    bars.className = 'bars';
    const max = Math.max(1, ...questionRow.bars.map((b) => b.count));
    for (const bar of questionRow.bars) {
      const cell = document.createElement('div');
      cell.className = 'bar-cell';
      const fill = document.createElement('div');
      fill.className = 'bar';
      fill.style.height = `${(bar.count / max) * 32 + 2}px`;
      fill.dataset.level = bar.label;
      fill.dataset.count = String(bar.count);
      const tick = document.createElement('div');
      tick.className = 'bar-label';
      tick.textContent = `${bar.label}:${bar.count}`;
      cell.append(fill, tick);
      bars.append(cell);
    }
    wrap.append(bars);

    const entry = document.createElement('input');
    entry.className = 'score-entry';
    entry.placeholder = 'my score';
    entry.addEventListener('keydown', (event) => {
      if (event.key === 'Enter' && entry.value.trim()) {
        handlers.onScore(questionRow.question.id, entry.value.trim());
        entry.value = '';
      }
    });
    const consensusEntry = document.createElement('input');
    consensusEntry.className = 'consensus-entry';
    consensusEntry.placeholder = 'consensus';
    consensusEntry.addEventListener('keydown', (event) => {
      if (event.key === 'Enter' && consensusEntry.value.trim()) {
        handlers.onConsensus(questionRow.question.id, consensusEntry.value.trim());
        consensusEntry.value = '';
      }
    });
    const inputs = document.createElement('div');
    inputs.className = 'inputs';
    inputs.append(entry, consensusEntry);
    wrap.append(inputs);
    table.append(wrap);
  }
  root.append(table);

  const finalize = document.createElement('button');
  finalize.textContent = 'record decision';
  finalize.disabled = model.status !== 'finalized';
  finalize.addEventListener('click', () => handlers.onFinalize());
  root.append(finalize);
}

export function renderWhatIfPanel(root: HTMLElement, model: WhatIfPanelModel | null): void {
  root.replaceChildren();
  if (!model) return;
  const title = document.createElement('h3');
  title.textContent = `what if … ${model.at}`;
  root.append(title);
  root.append(row('quadrant', model.quadrant, 'whatif-quadrant'));
  root.append(row('objective', model.objective, 'whatif-objective'));
  if (model.secondaryObjective) root.append(row('also consider', model.secondaryObjective));
  root.append(row('policy', model.policy, 'whatif-policy'));
  root.append(row('venue', model.venue, 'whatif-venue'));
}

export function renderNotices(root: HTMLElement, notices: string[], conflict: boolean): void {
  root.replaceChildren();
  if (conflict) {
    const banner = document.createElement('div');
    banner.className = 'banner conflict';
    banner.textContent = 'Version conflict: the board was refreshed with the latest session state.';
    root.append(banner);
  }
  for (const notice of notices.slice(-3)) {
    const div = document.createElement('div');
    div.className = 'banner notice';
    div.textContent = notice;
    root.append(div);
  }
}
