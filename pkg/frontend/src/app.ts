import { Api, ApiError, Explanation } from "./api.js";

export interface InstallOptions {
  apiBase?: string;
  fetchImpl?: typeof fetch;
}

// Shown only when the service itself is unreachable, so no API message exists.
const NETWORK_FAILURE_TEXT = "Could not reach the quiz service. Try again.";
const EMPTY_FIELDS_TEXT = "Enter a value and a unit before answering.";

function make<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  id: string,
  parent: HTMLElement,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  node.id = id;
  parent.appendChild(node);
  return node;
}

export function install(root: HTMLElement, options: InstallOptions = {}): void {
  const api = new Api(options.apiBase ?? "", options.fetchImpl ?? fetch);

  const heading = document.createElement("h1");
  heading.textContent = "Physics Quiz";
  root.appendChild(heading);

  const generateRow = make("div", "generate-row", root);
  const concept = make("input", "concept", generateRow);
  concept.type = "text";
  const generate = make("button", "generate", generateRow);
  generate.textContent = "Generate";

  const banner = make("div", "banner", root);
  banner.className = "banner";
  banner.hidden = true;

  const question = make("p", "question", root);

  const answerRow = make("div", "answer-row", root);
  const value = make("input", "value", answerRow);
  value.type = "text";
  const valueVerdict = make("span", "value-verdict", answerRow);
  valueVerdict.className = "verdict";
  const unit = make("input", "unit", answerRow);
  unit.type = "text";
  const unitVerdict = make("span", "unit-verdict", answerRow);
  unitVerdict.className = "verdict";
  const answer = make("button", "answer", answerRow);
  answer.textContent = "Answer";
  const reveal = make("button", "reveal", answerRow);
  reveal.textContent = "Reveal";

  const prompt = make("div", "prompt", root);
  prompt.hidden = true;

  const explanation = make("div", "explanation", root);
  explanation.hidden = true;

  let sessionId: string | null = null;
  let generateController: AbortController | null = null;
  let answerController: AbortController | null = null;

  function setAnswerEnabled(enabled: boolean): void {
    value.disabled = !enabled;
    unit.disabled = !enabled;
    answer.disabled = !enabled;
    reveal.disabled = !enabled;
  }
  setAnswerEnabled(false);

  function clearVerdicts(): void {
    valueVerdict.textContent = "";
    valueVerdict.className = "verdict";
    unitVerdict.textContent = "";
    unitVerdict.className = "verdict";
  }

  function renderVerdict(node: HTMLElement, correct: boolean, message: string): void {
    node.className = correct ? "verdict correct" : "verdict incorrect";
    node.textContent = correct ? "✓" : `✗ ${message}`;
  }

  function renderExplanation(body: Explanation | null): void {
    explanation.hidden = body === null;
    explanation.replaceChildren();
    if (body === null) return;
    const reference = document.createElement("p");
    reference.textContent = body.reference;
    explanation.appendChild(reference);
    for (const step of body.steps) {
      const line = document.createElement("p");
      const label = document.createElement("strong");
      label.textContent = `${step.label}: `;
      const text = document.createElement("code");
      text.textContent = step.text;
      line.append(label, text);
      explanation.appendChild(line);
    }
  }

  function showBanner(text: string): void {
    banner.textContent = text;
    banner.hidden = false;
  }

  async function onGenerate(): Promise<void> {
    generateController?.abort();
    const controller = new AbortController();
    generateController = controller;

    banner.hidden = true;
    prompt.hidden = true;
    sessionId = null;
    question.textContent = "";
    clearVerdicts();
    renderExplanation(null);
    setAnswerEnabled(false);

    try {
      const res = await api.question({ concept: concept.value }, controller.signal);
      if (generateController !== controller) return;
      sessionId = res.session_id;
      question.textContent = res.question_text;
      unit.placeholder = res.unit_hint;
      setAnswerEnabled(true);
    } catch (err) {
      if (controller.signal.aborted) return;
      showBanner(err instanceof ApiError ? err.body.message : NETWORK_FAILURE_TEXT);
    }
  }

  async function onAnswer(withReveal: boolean): Promise<void> {
    if (sessionId === null) return;
    const hasFields = value.value.trim() !== "" && unit.value.trim() !== "";
    if (!withReveal && !hasFields) {
      prompt.hidden = false;
      prompt.textContent = EMPTY_FIELDS_TEXT;
      return;
    }

    answerController?.abort();
    const controller = new AbortController();
    answerController = controller;
    banner.hidden = true;
    prompt.hidden = true;

    try {
      const res = await api.answer(
        { session_id: sessionId, value: value.value, unit: unit.value, reveal: withReveal },
        controller.signal,
      );
      if (answerController !== controller) return;
      // A reveal with blank fields is a plain "show me"; grading blanks is noise.
      if (hasFields) {
        let next = 0;
        renderVerdict(valueVerdict, res.value_correct, res.value_correct ? "" : res.messages[next++] ?? "");
        renderVerdict(unitVerdict, res.unit_correct, res.unit_correct ? "" : res.messages[next++] ?? "");
      } else {
        clearVerdicts();
      }
      renderExplanation(res.explanation);
    } catch (err) {
      if (controller.signal.aborted) return;
      if (err instanceof ApiError) {
        showBanner(err.body.message);
        if (err.status === 404 || err.status === 410) {
          sessionId = null;
          setAnswerEnabled(false);
        }
      } else {
        showBanner(NETWORK_FAILURE_TEXT);
      }
    }
  }

  generate.addEventListener("click", () => void onGenerate());
  answer.addEventListener("click", () => void onAnswer(false));
  reveal.addEventListener("click", () => void onAnswer(true));
}
