/** Plain-DOM rendering. Every function builds a detached element from
 * data plus callbacks; nothing in here talks to the network or mutates
 * state. Question ids and candidate order always come straight from
 * the server payloads.
 */

import type { ExplainView, NextResponse, ResultView, SurveySummary } from "./api";
import { canRetry, canSubmit, mode, type FlowState } from "./state";

export interface ViewHandlers {
  onPick(surveyId: string): void;
  onSelect(index: number): void;
  onSubmit(): void;
  onRetry(): void;
  onTogglePanel(): void;
}

export type AnswerLabel = (question: string, answer: number) => string | null;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function pct(fraction: number): string {
  const clamped = Math.min(1, Math.max(0, fraction));
  return `${(clamped * 100).toFixed(2)}%`;
}

export function renderSurveyPicker(
  surveys: SurveySummary[] | null,
  handlers: ViewHandlers,
): HTMLElement {
  const card = el("section", "ab-card ab-picker");
  card.append(el("h2", undefined, "Choose a questionnaire"));
  if (surveys === null) {
    card.append(el("p", "ab-muted", "Loading surveys..."));
    return card;
  }
  const published = surveys.filter((s) => s.status === "published");
  if (published.length === 0) {
    card.append(el("p", "ab-muted", "No published surveys available."));
    return card;
  }
  const list = el("div", "ab-picker-list");
  for (const survey of published) {
    const button = el("button", "ab-pick", survey.title);
    button.type = "button";
    button.dataset.surveyId = survey.id;
    button.addEventListener("click", () => handlers.onPick(survey.id));
    list.append(button);
  }
  card.append(list);
  return card;
}

export function renderBanner(state: FlowState, handlers: ViewHandlers): HTMLElement {
  const banner = el("div", "ab-banner");
  banner.append(el("span", "ab-banner-text", state.error ?? ""));
  if (canRetry(state)) {
    const retry = el("button", "ab-retry", "Retry");
    retry.type = "button";
    retry.addEventListener("click", () => handlers.onRetry());
    banner.append(retry);
  }
  return banner;
}

export function renderQuestionCard(state: FlowState, handlers: ViewHandlers): HTMLElement {
  const card = el("section", "ab-card ab-question");
  const question = state.current?.question;
  if (!question) {
    card.append(el("p", "ab-muted", "Waiting for the next question..."));
    return card;
  }
  const title = el("h2", "ab-question-text", question.text);
  title.dataset.questionId = question.id;
  card.append(title);

  const answers = el("div", "ab-answers");
  question.answers.forEach((label, index) => {
    const option = el("label", "ab-answer");
    const input = el("input");
    input.type = "radio";
    input.name = "answer";
    input.value = String(index);
    input.checked = state.selected === index;
    input.disabled = state.inFlight;
    input.addEventListener("change", () => handlers.onSelect(index));
    option.append(input, el("span", undefined, label));
    answers.append(option);
  });
  card.append(answers);

  const submit = el("button", "ab-submit", state.inFlight ? "Submitting..." : "Submit answer");
  submit.type = "button";
  submit.disabled = !canSubmit(state);
  submit.addEventListener("click", () => handlers.onSubmit());
  card.append(submit);

  card.append(el("p", "ab-progress", `Answered so far: ${state.history.length}`));
  return card;
}

function riskList(risks: Record<string, number>): HTMLElement | null {
  const entries = Object.entries(risks);
  if (entries.length === 0) return null;
  const dl = el("dl", "ab-risks");
  for (const [label, mass] of entries) {
    dl.append(el("dt", undefined, label), el("dd", undefined, (mass * 100).toFixed(1) + "%"));
  }
  return dl;
}

/** Terminal card before the transcript arrives; grade, reason and risks
 * are already on the last NextResponse. */
export function renderTerminalCard(current: NextResponse): HTMLElement {
  const card = el("section", "ab-card ab-result");
  card.append(el("h2", undefined, "Session complete"));
  if (current.grade !== null) {
    const grade = el("p", "ab-grade", `Grade: ${current.grade.toFixed(4)}`);
    grade.dataset.grade = String(current.grade);
    card.append(grade);
  }
  if (current.stop_reason) {
    const reason = el("p", "ab-stop-reason", `Stopped: ${current.stop_reason}`);
    reason.dataset.stopReason = current.stop_reason;
    card.append(reason);
  }
  if (current.risks) {
    const risks = riskList(current.risks);
    if (risks) card.append(risks);
  }
  card.append(el("p", "ab-muted", "Loading transcript..."));
  return card;
}

export function renderResultCard(result: ResultView, answerLabel: AnswerLabel): HTMLElement {
  const card = el("section", "ab-card ab-result");
  card.append(el("h2", undefined, "Session complete"));

  const grade = el("p", "ab-grade", `Grade: ${result.grade.toFixed(4)}`);
  grade.dataset.grade = String(result.grade);
  card.append(grade);

  const reason = el("p", "ab-stop-reason", `Stopped: ${result.stop_reason}`);
  reason.dataset.stopReason = result.stop_reason;
  card.append(reason);

  const risks = riskList(result.risks);
  if (risks) card.append(risks);

  const table = el("table", "ab-transcript");
  const head = el("tr");
  for (const column of ["Question", "Answer", "Gain", "Entropy after"]) {
    head.append(el("th", undefined, column));
  }
  table.append(head);
  for (const entry of result.transcript) {
    const row = el("tr");
    row.dataset.question = entry.question;
    const label = answerLabel(entry.question, entry.answer) ?? String(entry.answer);
    row.append(
      el("td", undefined, entry.question),
      el("td", undefined, label),
      el("td", undefined, entry.gain.toFixed(4)),
      el("td", undefined, entry.entropy_after.toFixed(4)),
    );
    table.append(row);
  }
  card.append(el("h3", undefined, "Transcript"), table);
  return card;
}

export function renderExplanationPanel(
  report: ExplainView | null,
  open: boolean,
  handlers: ViewHandlers,
): HTMLElement {
  const panel = el("section", "ab-card ab-explain");
  const head = el("div", "ab-explain-head");
  head.append(el("h3", undefined, "Why this question?"));
  const toggle = el("button", "ab-toggle", open ? "Hide" : "Show");
  toggle.type = "button";
  toggle.addEventListener("click", () => handlers.onTogglePanel());
  head.append(toggle);
  panel.append(head);
  if (!open) return panel;
  if (!report) {
    panel.append(el("p", "ab-muted", "Loading explanation..."));
    return panel;
  }

  // entropy vs threshold; scale leaves headroom so the marker stays inside
  const scale = Math.max(report.joint_entropy, report.stop_threshold, 1e-12) * 1.15;
  const stopped = report.stop_margin <= 0;
  const gauge = el("div", stopped ? "ab-gauge ab-gauge--stop" : "ab-gauge");
  const zone = el("div", "ab-gauge-zone");
  zone.style.width = pct(report.stop_threshold / scale);
  const marker = el("div", "ab-gauge-marker");
  marker.style.left = pct(report.joint_entropy / scale);
  gauge.append(zone, marker);
  panel.append(
    el(
      "p",
      "ab-gauge-label",
      `Remaining uncertainty: ${report.joint_entropy.toFixed(3)} bits` +
        ` (stops at ${report.stop_threshold})`,
    ),
    gauge,
  );

  panel.append(el("h4", undefined, "Expected information gain"));
  const gains = el("div", "ab-gains");
  if (report.per_candidate.length === 0) {
    gains.append(el("p", "ab-gains-empty", "No remaining questions."));
  } else {
    const top = Math.max(...report.per_candidate.map((c) => c.gain));
    for (const candidate of report.per_candidate) {
      const row = el("div", "ab-gain-row");
      row.dataset.question = candidate.question;
      const bar = el("div", "ab-bar");
      bar.style.width = pct(top > 0 ? candidate.gain / top : 0);
      row.append(
        el("span", "ab-gain-name", candidate.question),
        bar,
        el("span", "ab-gain-value", candidate.gain.toFixed(4)),
      );
      gains.append(row);
    }
  }
  panel.append(gains);

  panel.append(el("h4", undefined, "Skill estimates"));
  const skills = el("div", "ab-skills");
  for (const [skill, probs] of Object.entries(report.skill_posteriors)) {
    const row = el("div", "ab-skill-row");
    row.dataset.skill = skill;
    const bar = el("div", "ab-skill-bar");
    probs.forEach((p, i) => {
      const segment = el("span", `ab-skill-seg ab-skill-seg-${i % 6}`);
      segment.style.width = pct(p);
      segment.title = `state ${i}: ${(p * 100).toFixed(1)}%`;
      bar.append(segment);
    });
    row.append(el("span", "ab-skill-name", skill), bar);
    skills.append(row);
  }
  panel.append(skills);
  return panel;
}

export interface AppContext {
  surveys: SurveySummary[] | null;
  answerLabel: AnswerLabel;
  handlers: ViewHandlers;
}

export function renderApp(state: FlowState, context: AppContext): HTMLElement {
  const app = el("div", "ab-app");
  if (state.sessionId === null) {
    app.append(renderSurveyPicker(context.surveys, context.handlers));
    return app;
  }
  if (state.error) app.append(renderBanner(state, context.handlers));
  switch (mode(state)) {
    case "taking":
      app.append(renderQuestionCard(state, context.handlers));
      break;
    case "terminal":
      app.append(renderTerminalCard(state.current as NextResponse));
      break;
    case "reviewing":
      app.append(renderResultCard(state.result as ResultView, context.answerLabel));
      break;
  }
  if (state.panelEnabled) {
    app.append(renderExplanationPanel(state.explanation, state.panelOpen, context.handlers));
  }
  return app;
}
