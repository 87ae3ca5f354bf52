// Label-fidelity integration test against a live server.
//
// Serves the case-A fixture through the real HTTP API, loads the board the
// way the browser would, and checks that every label the UI renders equals
// the API's own answer: every plotted artifact, and 50 random what-if points.

import { spawn, execFileSync, type ChildProcess } from 'node:child_process';
import { mkdtempSync, rmSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';

import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { artifactPanelModel, matrixModel, whatIfPanelModel } from '../src/render.js';
import { BoardState } from '../src/state.js';

const SESSION = 'case-a';
const PORT = 8900 + (process.pid % 500);
const BASE = `http://127.0.0.1:${PORT}`;

let workDir: string;
let server: ChildProcess;
let api: ApiClient;
let state: BoardState;

/** Deterministic PRNG so the 50 sample points are reproducible. */
function mulberry32(seed: number): () => number {
  let a = seed;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

async function waitForServer(): Promise<void> {
  const deadline = Date.now() + 60_000;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/api/v1/config`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error('server did not come up');
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), 'cap-ui-'));
  const portfolio = join(workDir, 'case-a.json');
  execFileSync('cap', ['fixture', '--name', 'case-a', '--portfolio', portfolio]);
  server = spawn('cap', [
    'serve', '--portfolio', portfolio, '--port', String(PORT), '--host', '127.0.0.1',
  ], { stdio: 'ignore' });
  await waitForServer();

  api = new ApiClient(BASE);
  state = new BoardState(api, SESSION);
  await state.load();
});

afterAll(() => {
  server?.kill('SIGTERM');
  if (workDir) rmSync(workDir, { recursive: true, force: true });
});

describe('label fidelity against the live API', () => {
  it('every rendered artifact label equals the API classification', async () => {
    const config = state.config!;
    const session = state.session!;
    expect(session.artifacts.length).toBe(20);

    const matrix = matrixModel(config, session, state.cornerLabels, null, null, null);
    expect(matrix.points.length).toBe(20);

    for (const artifact of session.artifacts) {
      const fromApi = await api.classification(SESSION, artifact.artifact_id);
      const point = matrix.points.find((p) => p.artifactId === artifact.artifact_id)!;
      expect(point.quadrant).toBe(fromApi.quadrant);
      expect(point.objective).toBe(fromApi.primary_objective);
      expect(point.cc).toBe(fromApi.scores.control_complexity);
      expect(point.bi).toBe(fromApi.scores.business_impact);

      const panel = artifactPanelModel(config, artifact);
      expect(panel.quadrant).toBe(fromApi.quadrant);
      expect(panel.objective).toBe(fromApi.primary_objective);
      expect(panel.policy).toBe(fromApi.policy);
      expect(panel.venue).toBe(fromApi.venue);
      expect(panel.flags).toEqual(fromApi.boundary_flags);
    }
  });

  it('case-A plots 4/4/1/11 points by quadrant', () => {
    const matrix = matrixModel(state.config!, state.session!, [], null, null, null);
    const counts: Record<string, number> = {};
    for (const point of matrix.points) {
      counts[point.quadrant] = (counts[point.quadrant] ?? 0) + 1;
    }
    expect(counts).toEqual({
      Standard: 4,
      ProductsBottleneck: 4,
      PlatformLeverage: 11,
      Strategic: 1,
    });
  });

  it('matrix corner labels come from server previews', async () => {
    expect(state.cornerLabels.length).toBe(4);
    for (const corner of state.cornerLabels) {
      const probe = await api.preview(
        SESSION, 'corner',
        corner.biHigh ? 3.8 : 1.2,
        corner.ccHigh ? 3.8 : 1.2,
      );
      expect(corner.quadrant).toBe(probe.quadrant);
    }
  });

  it('50 random what-if points render exactly the API preview', async () => {
    const random = mulberry32(20240811);
    state.select(state.session!.artifacts[0]!.artifact_id);
    for (let i = 0; i < 50; i += 1) {
      const bi = 1 + random() * 3;
      const cc = 1 + random() * 3;
      const shown = await state.whatIfAt({ bi, cc });
      expect(shown).not.toBeNull();
      const panel = whatIfPanelModel(state.whatIfPreview!);
      const fromApi = await api.preview(SESSION, 'check', bi, cc);
      expect(panel.quadrant).toBe(fromApi.quadrant);
      expect(panel.objective).toBe(fromApi.primary_objective);
      expect(panel.secondaryObjective).toBe(fromApi.secondary_objective);
      expect(panel.policy).toBe(fromApi.policy);
      expect(panel.venue).toBe(fromApi.venue);
    }
  });

  it('dragging to (3.5, 3.5) previews the strategic corner', async () => {
    state.select(state.session!.artifacts[0]!.artifact_id);
    const preview = await state.whatIfAt({ bi: 3.5, cc: 3.5 });
    const fromApi = await api.preview(SESSION, 'check', 3.5, 3.5);
    expect(preview!.quadrant).toBe(fromApi.quadrant);
    expect(preview!.quadrant).toBe('Strategic');
    expect(preview!.primary_objective).toBe('ControlFocus');
  });

  it('dragging to the artifact’s own point previews its current labels', async () => {
    const artifact = state.session!.artifacts[0]!;
    state.select(artifact.artifact_id);
    const current = artifact.classification!;
    const preview = await state.whatIfAt({
      bi: current.scores.business_impact,
      cc: current.scores.control_complexity,
    });
    expect(preview!.quadrant).toBe(current.quadrant);
    expect(preview!.primary_objective).toBe(current.primary_objective);
  });

  it('what-if exploration never mutates the session', async () => {
    const before = await api.getSession(SESSION);
    const random = mulberry32(7);
    for (let i = 0; i < 10; i += 1) {
      await state.whatIfAt({ bi: 1 + random() * 3, cc: 1 + random() * 3 });
    }
    const after = await api.getSession(SESSION);
    expect(after.version).toBe(before.version);
    expect(after).toEqual(before);
  });
});

describe('scoring against the live API', () => {
  it('score entry refreshes distributions; stale writes surface a conflict', async () => {
    await api.createSession('ui-live', ['NEW-1']);
    const live = new BoardState(api, 'ui-live');
    live.config = state.config;
    await live.refresh();

    const ok = await live.enterScore('NEW-1', 'alice', 'bi1', 2);
    expect(ok).toBe(true);
    let view = live.artifact('NEW-1')!;
    expect(view.distributions['bi1']).toEqual({ '2': 1 });

    const ok2 = await live.enterScore('NEW-1', 'bob', 'bi1', 4);
    expect(ok2).toBe(true);
    view = live.artifact('NEW-1')!;
    expect(view.distributions['bi1']).toEqual({ '2': 1, '4': 1 });

    // a second client writes with a token this client already spent
    const staleVersion = live.version;
    await api.postScores('ui-live', 'NEW-1', 'carol', { bi2: 3 }, staleVersion);
    let sawConflict = false;
    live.subscribe(() => {
      sawConflict = sawConflict || live.conflict;
    });
    const stale = await live.enterScore('NEW-1', 'dave', 'bi2', 1);
    expect(stale).toBe(false);
    expect(sawConflict).toBe(true);
    expect(live.version).toBeGreaterThan(staleVersion);

    // after the automatic refetch the write goes through
    const retried = await live.enterScore('NEW-1', 'dave', 'bi2', 1);
    expect(retried).toBe(true);
  });

  it('out-of-scale input never reaches the server', async () => {
    const live = new BoardState(api, 'ui-live');
    live.config = state.config;
    await live.refresh();
    const before = live.version;
    const ok = await live.enterScore('NEW-1', 'alice', 'bi1', 9);
    expect(ok).toBe(false);
    await live.refresh();
    expect(live.version).toBe(before);
  });
});
