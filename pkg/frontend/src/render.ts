// Pure view models. The DOM layer prints these fields verbatim, so tests can
// check every label the board would display without a browser.
//
// All quadrant/objective strings are copied from API responses; this module
// only does geometry (where to draw), never classification (what to call it).

import type { CornerLabel, Point } from './state.js';
import type { ArtifactView, Classification, Question, ServerConfig, SessionView } from './types.js';

export const SCORE_MIN = 1;
export const SCORE_MAX = 4;

export interface XY {
  x: number;
  y: number;
}

export interface MatrixPointModel {
  artifactId: string;
  // score-space coordinates: x = control complexity, y = business impact
  cc: number;
  bi: number;
  quadrant: string; // verbatim from the API
  objective: string; // verbatim from the API
  flagged: boolean;
  status: string;
  selected: boolean;
}

export interface BandModel {
  objective: string; // verbatim from config.objective_order
  polygon: XY[]; // score-space polygon, clipped to the square
  index: number;
}

export interface QuadrantLabelModel {
  quadrant: string; // verbatim from a server preview
  at: XY; // score-space anchor
}

export interface MatrixModel {
  bands: BandModel[];
  thresholds: { vertical: number; horizontal: number };
  points: MatrixPointModel[];
  quadrantLabels: QuadrantLabelModel[];
  whatIf: { at: XY; quadrant: string; objective: string } | null;
}

/** Clip a convex polygon by the half-plane keep(p) >= 0 (Sutherland-Hodgman). */
function clipHalfPlane(polygon: XY[], keep: (p: XY) => number): XY[] {
  const out: XY[] = [];
  for (let i = 0; i < polygon.length; i += 1) {
    const current = polygon[i]!;
    const next = polygon[(i + 1) % polygon.length]!;
    const currentIn = keep(current) >= 0;
    const nextIn = keep(next) >= 0;
    if (currentIn) out.push(current);
    if (currentIn !== nextIn) {
      const t = keep(current) / (keep(current) - keep(next));
      out.push({ x: current.x + t * (next.x - current.x), y: current.y + t * (next.y - current.y) });
    }
  }
  return out;
}

/** Polygon of the region s1 <= (cc-1)+(bi-1) <= s2 inside the score square. */
function diagonalBand(s1: number, s2: number): XY[] {
  let polygon: XY[] = [
    { x: SCORE_MIN, y: SCORE_MIN },
    { x: SCORE_MAX, y: SCORE_MIN },
    { x: SCORE_MAX, y: SCORE_MAX },
    { x: SCORE_MIN, y: SCORE_MAX },
  ];
  const sum = (p: XY) => p.x - SCORE_MIN + (p.y - SCORE_MIN);
  polygon = clipHalfPlane(polygon, (p) => sum(p) - s1);
  polygon = clipHalfPlane(polygon, (p) => s2 - sum(p));
  return polygon;
}

export function bandModels(config: ServerConfig): BandModel[] {
  // objective_bands are thresholds on the blend m; the iso-sum value in score
  // space is (cc-1)+(bi-1) = 6m, spanning [0, 6].
  const edges = [0, ...config.objective_bands.map((m) => 6 * m), 6];
  const bands: BandModel[] = [];
  for (let k = 0; k + 1 < edges.length; k += 1) {
    bands.push({
      objective: config.objective_order[k] ?? `band-${k}`,
      polygon: diagonalBand(edges[k]!, edges[k + 1]!),
      index: k,
    });
  }
  return bands;
}

export function matrixModel(
  config: ServerConfig,
  session: SessionView | null,
  cornerLabels: CornerLabel[],
  selected: string | null,
  whatIf: Point | null,
  whatIfPreview: Classification | null,
): MatrixModel {
  const points: MatrixPointModel[] = [];
  for (const artifact of session?.artifacts ?? []) {
    const classification = artifact.classification;
    if (!classification) continue; // unscored artifacts have no position yet
    points.push({
      artifactId: artifact.artifact_id,
      cc: classification.scores.control_complexity,
      bi: classification.scores.business_impact,
      quadrant: classification.quadrant,
      objective: classification.primary_objective,
      flagged: classification.boundary_flags.length > 0,
      status: artifact.status,
      selected: artifact.artifact_id === selected,
    });
  }

  const mid = (high: boolean) =>
    high
      ? (config.quadrant_threshold + SCORE_MAX) / 2
      : (SCORE_MIN + config.quadrant_threshold) / 2;

  return {
    bands: bandModels(config),
    thresholds: { vertical: config.quadrant_threshold, horizontal: config.quadrant_threshold },
    points,
    quadrantLabels: cornerLabels.map((corner) => ({
      quadrant: corner.quadrant,
      at: { x: mid(corner.ccHigh), y: mid(corner.biHigh) },
    })),
    whatIf:
      whatIf && whatIfPreview
        ? {
            at: { x: whatIf.cc, y: whatIf.bi },
            quadrant: whatIfPreview.quadrant,
            objective: whatIfPreview.primary_objective,
          }
        : null,
  };
}

export interface DistributionBar {
  label: string;
  count: number;
}

export interface QuestionRowModel {
  question: Question;
  bars: DistributionBar[]; // one per scale level, zero-filled, low to high
  consensus: string | null;
}

export interface ArtifactPanelModel {
  artifactId: string;
  status: string;
  participants: string[];
  scoreLine: string | null; // e.g. "bi=2.8 cc=2.4 (consensus)"
  quadrant: string | null; // verbatim from the API
  objective: string | null; // primary, verbatim
  secondaryObjective: string | null;
  policy: string | null;
  venue: string | null;
  flags: string[];
  questionRows: QuestionRowModel[];
}

export function formatScore(value: number): string {
  return value.toFixed(1);
}

export function artifactPanelModel(
  config: ServerConfig,
  view: ArtifactView,
): ArtifactPanelModel {
  const classification = view.classification;
  const scores = view.consensus_scores ?? view.provisional_scores;
  const levels = (config.scale_levels[view.scale] ?? []).map(String);
  const questionRows: QuestionRowModel[] = [];
  for (const battery of Object.values(config.batteries)) {
    for (const question of battery) {
      const counts = view.distributions[question.id] ?? {};
      questionRows.push({
        question,
        bars: levels.map((label) => ({ label, count: counts[label] ?? 0 })),
        consensus: null,
      });
    }
  }
  return {
    artifactId: view.artifact_id,
    status: view.status,
    participants: view.participants,
    scoreLine: scores
      ? `bi=${formatScore(scores.business_impact)} cc=${formatScore(scores.control_complexity)}` +
        (classification ? ` (${classification.source})` : '')
      : null,
    quadrant: classification?.quadrant ?? null,
    objective: classification?.primary_objective ?? null,
    secondaryObjective: classification?.secondary_objective ?? null,
    policy: classification?.policy ?? null,
    venue: classification?.venue ?? null,
    flags: classification?.boundary_flags ?? [],
    questionRows,
  };
}

export interface WhatIfPanelModel {
  at: string; // "bi=3.5 cc=3.5"
  quadrant: string;
  objective: string;
  secondaryObjective: string | null;
  policy: string;
  venue: string;
}

export function whatIfPanelModel(preview: Classification): WhatIfPanelModel {
  return {
    at: `bi=${formatScore(preview.scores.business_impact)} cc=${formatScore(preview.scores.control_complexity)}`,
    quadrant: preview.quadrant,
    objective: preview.primary_objective,
    secondaryObjective: preview.secondary_objective,
    policy: preview.policy,
    venue: preview.venue,
  };
}
