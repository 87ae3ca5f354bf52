// Wire types for /api/v1, mirroring the server's response models.

export type RawAnswer = number | string;

export interface ScorePair {
  business_impact: number;
  control_complexity: number;
}

export interface Classification {
  artifact_id: string | null;
  source: 'consensus' | 'provisional' | 'what_if';
  scores: ScorePair;
  quadrant: string;
  boundary_flags: string[];
  primary_objective: string;
  secondary_objective: string | null;
  policy: string;
  venue: string;
  objective_blend: number;
}

export interface ArtifactView {
  artifact_id: string;
  status: 'unscored' | 'provisional' | 'finalized';
  scale: string;
  participants: string[];
  distributions: Record<string, Record<string, number>>;
  provisional_scores: ScorePair | null;
  consensus_scores: ScorePair | null;
  classification: Classification | null;
}

export interface SessionView {
  session_id: string;
  version: number;
  artifacts: ArtifactView[];
}

export interface Question {
  id: string;
  text: string;
  guidance: string;
}

export interface ServerConfig {
  default_scale: string;
  scale_levels: Record<string, RawAnswer[]>;
  quadrant_threshold: number;
  boundary_width: number;
  objective_bands: number[];
  objective_order: string[];
  secondary_epsilon: number;
  batteries: Record<string, Question[]>;
}

export interface Decision {
  artifact_id: string;
  scores: ScorePair;
  quadrant: string;
  boundary_flags: string[];
  primary_objective: string;
  secondary_objective: string | null;
  policy: string;
  venue: string;
  rationale: string;
  decided_at: string;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  details?: Record<string, unknown>;
}
