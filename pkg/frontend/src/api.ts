/** Typed client for the adaptive questionnaire REST API.
 *
 * Shapes mirror the service's published OpenAPI description field for
 * field. The client adds nothing on top: no retries, no caching, no
 * reordering. Errors become ApiError with the HTTP status and the raw
 * `detail` payload.
 */

export interface SurveySummary {
  id: string;
  title: string;
  status: "draft" | "published";
  created_at: string;
  updated_at: string;
}

/** The parts of the questionnaire document the client reads. */
export interface QuestionnaireDocument {
  title: string;
  description: string;
  explanation_panel: boolean;
  stop_threshold: number;
  questions: Array<{ id: string; text: string; answers: string[]; states: string[] }>;
  [key: string]: unknown;
}

export interface SurveyResource extends SurveySummary {
  document: QuestionnaireDocument;
}

export interface QuestionView {
  id: string;
  text: string;
  answers: string[];
}

export interface NextResponse {
  session_id: string;
  survey_id: string;
  terminal: boolean;
  question: QuestionView | null;
  stop_reason: string | null;
  grade: number | null;
  risks: Record<string, number> | null;
}

export interface SessionCreated {
  session_id: string;
  survey_id: string;
  next: NextResponse;
}

export interface CandidateGain {
  question: string;
  gain: number;
}

export interface ExplainView {
  session_id: string;
  survey_id: string;
  skill_posteriors: Record<string, number[]>;
  joint_entropy: number;
  stop_threshold: number;
  stop_margin: number;
  per_candidate: CandidateGain[];
}

export interface TranscriptEntry {
  question: string;
  answer: number;
  gain: number;
  entropy_after: number;
}

export interface ResultView {
  session_id: string;
  survey_id: string;
  stop_reason: string;
  grade: number;
  risks: Record<string, number>;
  transcript: TranscriptEntry[];
}

export class ApiError extends Error {
  readonly status: number;
  readonly detail: unknown;

  constructor(status: number, detail: unknown) {
    super(messageFrom(status, detail));
    this.name = "ApiError";
    this.status = status;
    this.detail = detail;
  }
}

function messageFrom(status: number, detail: unknown): string {
  if (typeof detail === "string") return detail;
  if (detail && typeof detail === "object") {
    const m = (detail as { message?: unknown }).message;
    if (typeof m === "string") return m;
  }
  return `request failed with status ${status}`;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export interface Client {
  listSurveys(): Promise<SurveySummary[]>;
  getSurvey(surveyId: string): Promise<SurveyResource>;
  createSession(surveyId: string): Promise<SessionCreated>;
  submitAnswer(sessionId: string, question: string, answer: number): Promise<NextResponse>;
  fetchNext(sessionId: string): Promise<NextResponse>;
  fetchExplanation(sessionId: string): Promise<ExplainView>;
  fetchResult(sessionId: string): Promise<ResultView>;
}

export function createClient(baseUrl: string, fetchFn?: FetchLike): Client {
  const base = baseUrl.replace(/\/+$/, "");
  // wrap instead of aliasing: a bare `fetch` reference loses its `this`
  const doFetch: FetchLike = fetchFn ?? ((input, init) => fetch(input, init));

  async function request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await doFetch(base + path, init);
    const payload: unknown = await response.json().catch(() => null);
    if (!response.ok) {
      const detail =
        payload && typeof payload === "object" && "detail" in payload
          ? (payload as { detail: unknown }).detail
          : payload;
      throw new ApiError(response.status, detail);
    }
    return payload as T;
  }

  return {
    listSurveys: () => request("GET", "/surveys"),
    getSurvey: (surveyId) => request("GET", `/surveys/${encodeURIComponent(surveyId)}`),
    createSession: (surveyId) =>
      request("POST", `/surveys/${encodeURIComponent(surveyId)}/sessions`),
    submitAnswer: (sessionId, question, answer) =>
      request("POST", `/sessions/${encodeURIComponent(sessionId)}/answers`, { question, answer }),
    fetchNext: (sessionId) => request("GET", `/sessions/${encodeURIComponent(sessionId)}/next`),
    fetchExplanation: (sessionId) =>
      request("GET", `/sessions/${encodeURIComponent(sessionId)}/explain`),
    fetchResult: (sessionId) => request("GET", `/sessions/${encodeURIComponent(sessionId)}/result`),
  };
}
