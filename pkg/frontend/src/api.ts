export interface QuestionRequest {
  concept: string;
  target?: string;
  seed?: number;
  range?: [number, number];
}

export interface QuestionResponse {
  schema_version: number;
  session_id: string;
  concept_qid: string;
  concept_label: string;
  question_text: string;
  target_symbol: string;
  target_name: string;
  unit_hint: string;
}

export interface ExplanationStep {
  label: string;
  text: string;
}

export interface Explanation {
  reference: string;
  steps: ExplanationStep[];
  final_value: string;
  final_unit: string;
}

export interface AnswerRequest {
  session_id: string;
  value: string;
  unit: string;
  reveal: boolean;
}

export interface AnswerResponse {
  schema_version: number;
  session_id: string;
  value_correct: boolean;
  unit_correct: boolean;
  messages: string[];
  attempts: number;
  explanation: Explanation | null;
}

export interface ApiErrorBody {
  code: string;
  message: string;
}

// Non-2xx responses carry {code, message}; the message is shown verbatim.
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: ApiErrorBody,
  ) {
    super(body.message);
  }
}

export class Api {
  constructor(
    private readonly base = "",
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  question(req: QuestionRequest, signal?: AbortSignal): Promise<QuestionResponse> {
    return this.post("/api/v1/question", req, signal);
  }

  answer(req: AnswerRequest, signal?: AbortSignal): Promise<AnswerResponse> {
    return this.post("/api/v1/answer", req, signal);
  }

  private async post<T>(path: string, payload: unknown, signal?: AbortSignal): Promise<T> {
    const response = await this.fetchImpl(`${this.base}${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
      signal,
    });
    if (!response.ok) {
      throw new ApiError(response.status, (await response.json()) as ApiErrorBody);
    }
    return (await response.json()) as T;
  }
}
