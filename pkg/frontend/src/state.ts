// Client-side board state: session snapshot, selection, what-if exploration,
// and version-tokened edits.
//
// Every quadrant/objective label shown anywhere on the board comes from an
// API response (stored classification or preview endpoint); this module never
// recomputes band geometry locally.

import { ApiClient, ApiError } from './api.js';
import type {
  ArtifactView,
  Classification,
  RawAnswer,
  ServerConfig,
  SessionView,
} from './types.js';

export interface Point {
  bi: number;
  cc: number;
}

export interface CornerLabel {
  quadrant: string; // server-provided name for the quadrant region
  biHigh: boolean;
  ccHigh: boolean;
}

const SCORE_MIN = 1;
const SCORE_MAX = 4;

export function clampPoint(point: Point): Point {
  const clamp = (v: number) => Math.min(SCORE_MAX, Math.max(SCORE_MIN, v));
  return { bi: clamp(point.bi), cc: clamp(point.cc) };
}

/** Validate a raw entry against the scale's levels before any network call.
 * Returns the normalized answer, or null when the value is out of scale. */
export function normalizeAnswer(
  config: ServerConfig,
  scale: string,
  value: RawAnswer,
): RawAnswer | null {
  const levels = config.scale_levels[scale];
  if (!levels) return null;
  for (const level of levels) {
    if (typeof level === 'number') {
      const numeric = typeof value === 'number' ? value : Number(String(value).trim());
      if (Number.isFinite(numeric) && numeric === level) return level;
    } else if (String(value).trim().toLowerCase() === level.toLowerCase()) {
      return level;
    }
  }
  return null;
}

type Listener = () => void;

export class BoardState {
  config: ServerConfig | null = null;
  session: SessionView | null = null;
  selected: string | null = null;
  whatIf: Point | null = null;
  whatIfPreview: Classification | null = null;
  cornerLabels: CornerLabel[] = [];
  conflict = false;
  notices: string[] = [];

  private listeners: Listener[] = [];

  constructor(
    readonly api: ApiClient,
    readonly sessionId: string,
  ) {}

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  get version(): number {
    return this.session?.version ?? 0;
  }

  artifact(artifactId: string): ArtifactView | undefined {
    return this.session?.artifacts.find((a) => a.artifact_id === artifactId);
  }

  get selectedArtifact(): ArtifactView | undefined {
    return this.selected ? this.artifact(this.selected) : undefined;
  }

  async load(): Promise<void> {
    this.config = await this.api.getConfig();
    await this.refresh();
    await this.loadCornerLabels();
    this.emit();
  }

  /** Quadrant names for the matrix furniture, asked from the server by
   * previewing a representative point deep inside each quadrant. */
  private async loadCornerLabels(): Promise<void> {
    const probes: Array<{ point: Point; biHigh: boolean; ccHigh: boolean }> = [
      { point: { bi: 1.2, cc: 1.2 }, biHigh: false, ccHigh: false },
      { point: { bi: 1.2, cc: 3.8 }, biHigh: false, ccHigh: true },
      { point: { bi: 3.8, cc: 1.2 }, biHigh: true, ccHigh: false },
      { point: { bi: 3.8, cc: 3.8 }, biHigh: true, ccHigh: true },
    ];
    const labels: CornerLabel[] = [];
    for (const probe of probes) {
      const preview = await this.api.preview(this.sessionId, 'corner', probe.point.bi, probe.point.cc);
      labels.push({ quadrant: preview.quadrant, biHigh: probe.biHigh, ccHigh: probe.ccHigh });
    }
    this.cornerLabels = labels;
  }

  async refresh(): Promise<void> {
    this.session = await this.api.getSession(this.sessionId);
    this.conflict = false;
    this.emit();
  }

  select(artifactId: string | null): void {
    this.selected = artifactId;
    this.whatIf = null;
    this.whatIfPreview = null;
    this.emit();
  }

  notice(message: string): void {
    this.notices.push(message);
    this.emit();
  }

  clearNotices(): void {
    this.notices = [];
    this.emit();
  }

  /** Record one participant's answer for one question. Rejects out-of-scale
   * values before any POST; stale versions raise the conflict banner and
   * trigger a refetch. Returns true when the answer was stored. */
  async enterScore(
    artifactId: string,
    participantId: string,
    questionId: string,
    value: RawAnswer,
  ): Promise<boolean> {
    if (!this.config || !this.session) throw new Error('board not loaded');
    const view = this.artifact(artifactId);
    const scale = view?.scale ?? this.config.default_scale;
    const normalized = normalizeAnswer(this.config, scale, value);
    if (normalized === null) {
      this.notice(`"${value}" is not a valid ${scale} answer`);
      return false;
    }
    try {
      await this.api.postScores(
        this.sessionId,
        artifactId,
        participantId,
        { [questionId]: normalized },
        this.version,
      );
      await this.refresh();
      return true;
    } catch (error) {
      return this.handleEditError(error);
    }
  }

  async enterConsensus(artifactId: string, answers: Record<string, RawAnswer>): Promise<boolean> {
    if (!this.session) throw new Error('board not loaded');
    try {
      await this.api.putConsensus(this.sessionId, artifactId, answers, this.version);
      await this.refresh();
      return true;
    } catch (error) {
      return this.handleEditError(error);
    }
  }

  private async handleEditError(error: unknown): Promise<boolean> {
    if (error instanceof ApiError && error.status === 409) {
      this.conflict = true;
      this.notice('someone else updated the session; refreshed to the latest state');
      this.emit();
      await this.refresh();
      return false;
    }
    if (error instanceof ApiError) {
      this.notice(`${error.code}: ${error.message}`);
      return false;
    }
    throw error;
  }

  /** Drag-to-what-if: ask the server what a point would mean. Coordinates are
   * clamped to the score square; nothing is persisted. Network errors are
   * surfaced as notices and leave the previous preview in place. */
  async whatIfAt(point: Point): Promise<Classification | null> {
    const clamped = clampPoint(point);
    const artifactId = this.selected ?? 'preview';
    try {
      const preview = await this.api.preview(this.sessionId, artifactId, clamped.bi, clamped.cc);
      this.whatIf = clamped;
      this.whatIfPreview = preview;
      this.emit();
      return preview;
    } catch (error) {
      if (error instanceof ApiError) {
        this.notice(`preview unavailable (${error.code})`);
        return null;
      }
      this.notice('preview unavailable (network error)');
      return null;
    }
  }

  clearWhatIf(): void {
    this.whatIf = null;
    this.whatIfPreview = null;
    this.emit();
  }
}
