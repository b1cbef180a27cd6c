/** Browser bootstrap. Query string picks the backend and survey, the
 * URL hash carries the session id so a reload resumes in place:
 *
 *   index.html?api=http://127.0.0.1:8000&survey=<id>#<session-id>
 */

import { mountApp } from "./app";

const params = new URLSearchParams(window.location.search);
const root = document.getElementById("app");
if (!root) throw new Error("missing #app element");

mountApp(root, {
  baseUrl: params.get("api") ?? "http://127.0.0.1:8000",
  surveyId: params.get("survey") ?? undefined,
  sessionId: window.location.hash.slice(1) || undefined,
  onSessionId: (sessionId) => {
    window.location.hash = sessionId;
  },
});
