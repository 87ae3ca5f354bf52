// Board bootstrap: wire the state store to the DOM panels.

import { ApiClient } from './api.js';
import { renderArtifactPanel, renderMatrix, renderNotices, renderWhatIfPanel } from './dom.js';
import { artifactPanelModel, matrixModel, whatIfPanelModel } from './render.js';
import { BoardState } from './state.js';

function required(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el;
}

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const sessionId = params.get('session') ?? 'workshop';
  const apiBase = params.get('api') ?? '';
  const participant = params.get('participant') ?? 'me';

  const api = new ApiClient(apiBase);
  const state = new BoardState(api, sessionId);

  const matrixEl = required('matrix');
  const panelEl = required('panel');
  const whatIfEl = required('what-if');
  const noticesEl = required('notices');
  required('session-name').textContent = sessionId;

  const draw = () => {
    if (!state.config) return;
    renderMatrix(
      matrixEl,
      matrixModel(state.config, state.session, state.cornerLabels, state.selected,
        state.whatIf, state.whatIfPreview),
      {
        onSelect: (artifactId) => state.select(artifactId),
        onDrag: (point) => {
          void state.whatIfAt(point);
        },
        onDragEnd: () => {
          /* preview stays visible until the next selection */
        },
      },
    );
    const selected = state.selectedArtifact;
    renderArtifactPanel(
      panelEl,
      selected && state.config ? artifactPanelModel(state.config, selected) : null,
      {
        onScore: (questionId, value) => {
          if (state.selected) void state.enterScore(state.selected, participant, questionId, value);
        },
        onConsensus: (questionId, value) => {
          if (state.selected) void state.enterConsensus(state.selected, { [questionId]: value });
        },
        onFinalize: () => {
          if (state.selected) {
            void api
              .finalizeDecision(state.selected, sessionId)
              .then(() => state.refresh())
              .catch((error) => state.notice(String(error)));
          }
        },
      },
    );
    renderWhatIfPanel(whatIfEl, state.whatIfPreview ? whatIfPanelModel(state.whatIfPreview) : null);
    renderNotices(noticesEl, state.notices, state.conflict);
  };

  state.subscribe(draw);
  try {
    await state.load();
  } catch (error) {
    state.notice(`cannot load session "${sessionId}": ${String(error)}`);
  }
  draw();

  // other participants' edits arrive by polling
  window.setInterval(() => {
    void state.refresh().catch(() => undefined);
  }, 4000);
}

void boot();
