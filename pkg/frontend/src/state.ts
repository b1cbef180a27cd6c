/** Client-side session state: a pure reducer over server responses.
 *
 * The server owns question order and evidence; this state only tracks
 * what the client has seen. `history` counts answers this client
 * instance got confirmed (a reload starts empty and relies on the
 * server transcript at the end), and an accepted answer equal to the
 * last entry is not appended again, so a retried submission that the
 * server absorbed idempotently cannot duplicate history.
 */

import type { ExplainView, NextResponse, ResultView } from "./api";

export type Mode = "taking" | "reviewing" | "terminal";

export interface AcceptedAnswer {
  question: string;
  answer: number;
  label: string;
}

export interface PendingSubmission {
  question: string;
  answer: number;
  label: string;
}

export interface FlowState {
  sessionId: string | null;
  surveyId: string | null;
  current: NextResponse | null;
  history: AcceptedAnswer[];
  explanation: ExplainView | null;
  result: ResultView | null;
  selected: number | null;
  inFlight: boolean;
  /* submission whose response was lost; retried verbatim */
  pending: PendingSubmission | null;
  error: string | null;
  panelEnabled: boolean;
  panelOpen: boolean;
}

export const initialState: FlowState = {
  sessionId: null,
  surveyId: null,
  current: null,
  history: [],
  explanation: null,
  result: null,
  selected: null,
  inFlight: false,
  pending: null,
  error: null,
  panelEnabled: false,
  panelOpen: true,
};

export type FlowEvent =
  | {
      kind: "session-started";
      sessionId: string;
      surveyId: string;
      next: NextResponse;
      panelEnabled: boolean;
    }
  | { kind: "answer-selected"; index: number }
  | { kind: "submission-sent"; question: string; answer: number; label: string }
  | { kind: "answer-accepted"; question: string; answer: number; label: string; next: NextResponse }
  | { kind: "submission-lost"; message: string }
  | { kind: "submission-rejected"; message: string }
  | { kind: "question-refreshed"; next: NextResponse }
  | { kind: "explanation-loaded"; report: ExplainView }
  | { kind: "result-loaded"; result: ResultView }
  | { kind: "panel-toggled" };

/** taking = a question is on screen; terminal = the server ended the
 * session; reviewing = terminal with the full result loaded. */
export function mode(state: FlowState): Mode {
  if (!state.current || !state.current.terminal) return "taking";
  return state.result ? "reviewing" : "terminal";
}

export function canSubmit(state: FlowState): boolean {
  return (
    mode(state) === "taking" &&
    state.current?.question != null &&
    state.selected !== null &&
    !state.inFlight &&
    state.pending === null
  );
}

export function canRetry(state: FlowState): boolean {
  return state.pending !== null && !state.inFlight;
}

export function reduce(state: FlowState, event: FlowEvent): FlowState {
  switch (event.kind) {
    case "session-started":
      return {
        ...initialState,
        sessionId: event.sessionId,
        surveyId: event.surveyId,
        current: event.next,
        panelEnabled: event.panelEnabled,
      };
    case "answer-selected":
      if (state.inFlight || mode(state) !== "taking") return state;
      return { ...state, selected: event.index };
    case "submission-sent":
      return {
        ...state,
        inFlight: true,
        error: null,
        pending: { question: event.question, answer: event.answer, label: event.label },
      };
    case "answer-accepted": {
      const last = state.history[state.history.length - 1];
      const duplicate = last !== undefined && last.question === event.question && last.answer === event.answer;
      const entry = { question: event.question, answer: event.answer, label: event.label };
      return {
        ...state,
        current: event.next,
        history: duplicate ? state.history : [...state.history, entry],
        selected: null,
        inFlight: false,
        pending: null,
        error: null,
      };
    }
    case "submission-lost":
      // no response arrived: keep pending and the selection so nothing is lost
      return { ...state, inFlight: false, error: event.message };
    case "submission-rejected":
      return { ...state, inFlight: false, pending: null, error: event.message };
    case "question-refreshed":
      return { ...state, current: event.next, selected: null };
    case "explanation-loaded":
      return { ...state, explanation: event.report };
    case "result-loaded":
      return { ...state, result: event.result };
    case "panel-toggled":
      return state.panelEnabled ? { ...state, panelOpen: !state.panelOpen } : state;
  }
}
