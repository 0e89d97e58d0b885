import type { Ack, Snapshot } from './types';

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(detail);
    this.name = 'ApiError';
  }
}

type Fetch = typeof fetch;

/** Thin typed wrapper over the session service HTTP API.
 * The fetch implementation is injectable so tests can replay fixtures. */
export class SessionClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: Fetch = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? undefined : { 'Content-Type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json();
    if (!response.ok) {
      const detail = typeof payload?.detail === 'string' ? payload.detail : response.statusText;
      throw new ApiError(response.status, detail);
    }
    return payload as T;
  }

  slots(): Promise<{ slots: string[] }> {
    return this.request('GET', '/slots');
  }

  register(slot: string): Promise<{ subject_id: string; slot: string }> {
    return this.request('POST', '/register', { slot });
  }

  start(subjectId: string): Promise<{ subject_id: string }> {
    return this.request('POST', `/subjects/${subjectId}/start`);
  }

  state(subjectId: string): Promise<Snapshot> {
    return this.request('GET', `/subjects/${subjectId}/state`);
  }

  ackInstructions(subjectId: string): Promise<Ack> {
    return this.request('POST', `/subjects/${subjectId}/instructions/ack`);
  }

  send(subjectId: string, amount: number): Promise<Ack> {
    return this.request('POST', `/subjects/${subjectId}/send`, { amount });
  }

  sendReturn(subjectId: string, amount: number): Promise<Ack> {
    return this.request('POST', `/subjects/${subjectId}/return`, { amount });
  }

  answerTimePref(subjectId: string, position: number, choice: string): Promise<Ack> {
    return this.request('POST', `/subjects/${subjectId}/answers/time-preference`, {
      position,
      choice,
    });
  }

  answerTrust(subjectId: string, position: number, value: number): Promise<Ack> {
    return this.request('POST', `/subjects/${subjectId}/answers/trust`, { position, value });
  }

  answerCertainty(
    subjectId: string,
    block: number,
    agreement: number,
    certainty: number,
  ): Promise<Ack> {
    return this.request('POST', `/subjects/${subjectId}/answers/certainty`, {
      block,
      agreement,
      certainty,
    });
  }

  answerDemographics(subjectId: string, answers: Record<string, string>): Promise<Ack> {
    return this.request('POST', `/subjects/${subjectId}/answers/demographics`, { answers });
  }

  ackDebrief(subjectId: string): Promise<Ack> {
    return this.request('POST', `/subjects/${subjectId}/debrief/ack`);
  }
}
