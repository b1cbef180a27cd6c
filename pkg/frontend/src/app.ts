/** Controller: owns the state, calls the API, re-renders on change.
 *
 * One answer submission is in flight at a time; the submit control is
 * disabled until the server responds. A lost response leaves a retry
 * banner and the same (question, answer) pair is resent verbatim, which
 * the server absorbs idempotently. A conflict (stale question) is
 * resolved by refetching the offered question.
 */

import {
  ApiError,
  createClient,
  type Client,
  type FetchLike,
  type NextResponse,
  type SurveyResource,
  type SurveySummary,
} from "./api";
import {
  canRetry,
  canSubmit,
  initialState,
  mode,
  reduce,
  type FlowEvent,
  type FlowState,
} from "./state";
import { renderApp, type ViewHandlers } from "./views";

export interface AppOptions {
  baseUrl: string;
  fetchFn?: FetchLike;
  /** Start a fresh session on this survey instead of showing the picker. */
  surveyId?: string;
  /** Resume an existing session; wins over surveyId. */
  sessionId?: string;
  /** Called once a session exists, so the embedder can persist the id. */
  onSessionId?: (sessionId: string) => void;
}

export class App {
  state: FlowState = initialState;
  private surveys: SurveySummary[] | null = null;
  private survey: SurveyResource | null = null;
  private readonly client: Client;
  private readonly handlers: ViewHandlers;

  constructor(
    private readonly root: HTMLElement,
    private readonly options: AppOptions,
  ) {
    this.client = createClient(options.baseUrl, options.fetchFn);
    this.handlers = {
      onPick: (surveyId) => void this.startSession(surveyId),
      onSelect: (index) => this.dispatch({ kind: "answer-selected", index }),
      onSubmit: () => void this.submit(),
      onRetry: () => void this.retry(),
      onTogglePanel: () => this.dispatch({ kind: "panel-toggled" }),
    };
  }

  async start(): Promise<void> {
    this.render();
    try {
      if (this.options.sessionId) {
        await this.resume(this.options.sessionId);
      } else if (this.options.surveyId) {
        await this.startSession(this.options.surveyId);
      } else {
        this.surveys = await this.client.listSurveys();
        this.render();
      }
    } catch (error) {
      this.dispatch({ kind: "submission-rejected", message: describe(error) });
    }
  }

  private dispatch(event: FlowEvent): void {
    this.state = reduce(this.state, event);
    this.render();
  }

  private render(): void {
    const document = this.survey?.document;
    this.root.replaceChildren(
      renderApp(this.state, {
        surveys: this.surveys,
        handlers: this.handlers,
        answerLabel: (question, answer) => {
          const spec = document?.questions.find((q) => q.id === question);
          const labels = spec?.answers?.length ? spec.answers : spec?.states;
          return labels?.[answer] ?? null;
        },
      }),
    );
  }

  private async startSession(surveyId: string): Promise<void> {
    this.survey = await this.client.getSurvey(surveyId);
    const created = await this.client.createSession(surveyId);
    this.options.onSessionId?.(created.session_id);
    this.dispatch({
      kind: "session-started",
      sessionId: created.session_id,
      surveyId,
      next: created.next,
      panelEnabled: this.survey.document.explanation_panel,
    });
    await this.advance(created.next);
  }

  private async resume(sessionId: string): Promise<void> {
    const next = await this.client.fetchNext(sessionId);
    this.survey = await this.client.getSurvey(next.survey_id);
    this.dispatch({
      kind: "session-started",
      sessionId,
      surveyId: next.survey_id,
      next,
      panelEnabled: this.survey.document.explanation_panel,
    });
    await this.advance(next);
  }

  /** Follow-up fetches after the state moved: result when terminal, a
   * fresh explanation whenever the panel is enabled. */
  private async advance(next: NextResponse): Promise<void> {
    const sessionId = this.state.sessionId;
    if (!sessionId) return;
    if (next.terminal) {
      const result = await this.client.fetchResult(sessionId);
      this.dispatch({ kind: "result-loaded", result });
    }
    if (this.state.panelEnabled) {
      const report = await this.client.fetchExplanation(sessionId);
      this.dispatch({ kind: "explanation-loaded", report });
    }
  }

  private async submit(): Promise<void> {
    if (!canSubmit(this.state)) return;
    const question = this.state.current?.question;
    const selected = this.state.selected;
    if (!question || selected === null) return;
    await this.send(question.id, selected, question.answers[selected] ?? String(selected));
  }

  private async retry(): Promise<void> {
    if (!canRetry(this.state)) return;
    const pending = this.state.pending;
    if (!pending) return;
    await this.send(pending.question, pending.answer, pending.label);
  }

  private async send(question: string, answer: number, label: string): Promise<void> {
    if (this.state.inFlight) return;
    this.dispatch({ kind: "submission-sent", question, answer, label });
    try {
      const next = await this.client.submitAnswer(this.state.sessionId as string, question, answer);
      this.dispatch({ kind: "answer-accepted", question, answer, label, next });
      await this.advance(next);
    } catch (error) {
      if (error instanceof ApiError) {
        this.dispatch({ kind: "submission-rejected", message: describe(error) });
        if (error.status === 409 && mode(this.state) === "taking") {
          // stale offer: the server knows the real current question
          const next = await this.client.fetchNext(this.state.sessionId as string);
          this.dispatch({ kind: "question-refreshed", next });
          await this.advance(next);
        }
      } else {
        this.dispatch({
          kind: "submission-lost",
          message: "The answer could not be confirmed. Check the connection and retry.",
        });
      }
    }
  }
}

function describe(error: unknown): string {
  if (error instanceof Error) return error.message;
  return String(error);
}

export function mountApp(root: HTMLElement, options: AppOptions): App {
  const app = new App(root, options);
  void app.start();
  return app;
}
