/** View model: the single mutable seam between the API and the renderer.
 *
 * State holds exactly what the screen needs: the session id, the last
 * committed server snapshot, the pending-action flag, the highlights from
 * the last delta, and the deleted-items tray. The snapshot is only ever
 * replaced by a server response body, never edited locally, so the view
 * always renders committed state. One action may be in flight at a time;
 * anything dispatched while pending is suppressed and never sent.
 */

import { ApiClient, ApiError } from "./api.js";
import type { AdditionDoc, Cohort, SessionView } from "./types.js";

export interface UiState {
  promptDraft: string;
  cohortDraft: Cohort;
  view: SessionView | null;
  pending: boolean;
  highlights: AdditionDoc[];
  trayOpen: boolean;
  exportText: string | null;
  notice: string | null;
}

export type DispatchResult =
  | { sent: true }
  | { sent: false; reason: "suppressed" | "no_session" | "finished" | "error" };

export function initialState(): UiState {
  return {
    promptDraft: "",
    cohortDraft: "full",
    view: null,
    pending: false,
    highlights: [],
    trayOpen: false,
    exportText: null,
    notice: null,
  };
}

export class ViewModel {
  private state: UiState = initialState();
  private listeners: ((state: UiState) => void)[] = [];

  constructor(private readonly api: ApiClient, onChange?: (state: UiState) => void) {
    if (onChange) this.listeners.push(onChange);
  }

  subscribe(listener: (state: UiState) => void): void {
    this.listeners.push(listener);
  }

  get snapshot(): UiState {
    return this.state;
  }

  private commit(patch: Partial<UiState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  setPromptDraft(text: string): void {
    this.commit({ promptDraft: text });
  }

  /** Track typing without notifying; the DOM already shows the keystroke and
   * a full re-render mid-word would steal focus from the text box. */
  setPromptDraftQuietly(text: string): void {
    this.state = { ...this.state, promptDraft: text };
  }

  setCohortDraft(cohort: Cohort): void {
    this.commit({ cohortDraft: cohort });
  }

  toggleTray(): void {
    this.commit({ trayOpen: !this.state.trayOpen });
  }

  /** Load an existing session, e.g. after a page reload. */
  async attach(sessionId: string): Promise<void> {
    const view = await this.api.getState(sessionId);
    const exportText = view.finished ? await this.api.exportText(sessionId) : null;
    this.commit({ view, exportText, highlights: [], notice: null });
  }

  /** Step 1: create the session from the prompt box, then begin. */
  async begin(): Promise<DispatchResult> {
    if (this.state.pending) return { sent: false, reason: "suppressed" };
    if (this.state.view !== null) return this.dispatch("begin", {});
    if (!this.state.promptDraft.trim()) return { sent: false, reason: "error" };
    this.commit({ pending: true, notice: null });
    try {
      const created = await this.api.createSession(
        this.state.promptDraft,
        this.state.cohortDraft,
      );
      this.commit({ view: created });
      const view = await this.api.act(created.id, "begin", {});
      this.commit({ pending: false, view, highlights: view.delta?.additions ?? [] });
      return { sent: true };
    } catch (err) {
      this.fail(err);
      return { sent: false, reason: "error" };
    }
  }

  /** Send one wire action; the response snapshot replaces the view. */
  async dispatch(
    action: string,
    payload: Record<string, unknown>,
  ): Promise<DispatchResult> {
    if (this.state.pending) return { sent: false, reason: "suppressed" };
    const current = this.state.view;
    if (current === null) return { sent: false, reason: "no_session" };
    if (current.finished) return { sent: false, reason: "finished" };
    this.commit({ pending: true, notice: null });
    try {
      const view = await this.api.act(current.id, action, payload);
      this.commit({ pending: false, view, highlights: view.delta?.additions ?? [] });
      return { sent: true };
    } catch (err) {
      this.fail(err);
      return { sent: false, reason: "error" };
    }
  }

  /** Step 5 exit: finish the session and keep the exported document. */
  async finish(): Promise<DispatchResult> {
    if (this.state.pending) return { sent: false, reason: "suppressed" };
    const current = this.state.view;
    if (current === null) return { sent: false, reason: "no_session" };
    this.commit({ pending: true, notice: null });
    try {
      const exportText = await this.api.finish(current.id);
      const view = await this.api.getState(current.id);
      this.commit({ pending: false, view, exportText, highlights: [] });
      return { sent: true };
    } catch (err) {
      this.fail(err);
      return { sent: false, reason: "error" };
    }
  }

  private fail(err: unknown): void {
    const notice =
      err instanceof ApiError
        ? `${err.code}: ${err.message}`
        : err instanceof Error
          ? err.message
          : String(err);
    this.commit({ pending: false, notice });
  }
}
