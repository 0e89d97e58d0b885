import { SessionClient } from './client';
import { renderScreen } from './screens';
import type { GameView, Snapshot } from './types';
import {
  validateCertainty,
  validateChoice,
  validateDemographics,
  validateGameMove,
  validateSlider,
} from './validation';

export interface ControllerEvents {
  onRender?: (html: string, snapshot: Snapshot) => void;
  onError?: (message: string) => void;
}

/** Drives one subject's session: fetches the snapshot, renders the current
 * screen, and validates inputs locally before they reach the server.
 * The debrief acknowledgment is the only action that can move a session to
 * Done; there is no client-side shortcut. */
export class SessionController {
  private snapshot: Snapshot | null = null;

  constructor(
    private readonly client: SessionClient,
    private readonly subjectId: string,
    private readonly events: ControllerEvents = {},
  ) {}

  get stage(): string {
    return this.snapshot?.stage ?? 'unknown';
  }

  get current(): Snapshot | null {
    return this.snapshot;
  }

  async refresh(): Promise<Snapshot> {
    this.snapshot = await this.client.state(this.subjectId);
    this.events.onRender?.(renderScreen(this.snapshot), this.snapshot);
    return this.snapshot;
  }

  private reject(message: string): null {
    this.events.onError?.(message);
    return null;
  }

  async ackInstructions(): Promise<Snapshot | null> {
    if (this.stage !== 'instructions') return this.reject('not on the instructions screen');
    await this.client.ackInstructions(this.subjectId);
    return this.refresh();
  }

  async submitGameMove(amount: number): Promise<Snapshot | null> {
    const game = this.snapshot?.game as GameView | undefined;
    if (!game) return this.reject('no game in progress');
    const problem = validateGameMove(game, amount);
    if (problem) return this.reject(problem);
    if (game.awaiting === 'send') {
      await this.client.send(this.subjectId, amount);
    } else {
      await this.client.sendReturn(this.subjectId, amount);
    }
    return this.refresh();
  }

  async submitTimePref(choice: string): Promise<Snapshot | null> {
    const question = this.snapshot?.question;
    if (this.stage !== 'time_pref' || !question || !('options' in question)) {
      return this.reject('not on a time-preference question');
    }
    const problem = validateChoice(choice);
    if (problem) return this.reject(problem);
    await this.client.answerTimePref(this.subjectId, question.position, choice);
    return this.refresh();
  }

  async submitTrust(value: number): Promise<Snapshot | null> {
    const question = this.snapshot?.question;
    if (this.stage !== 'trust' || !question || !('labels' in question)) {
      return this.reject('not on a trust question');
    }
    const problem = validateSlider(value, question.scale);
    if (problem) return this.reject(problem);
    await this.client.answerTrust(this.subjectId, question.position, value);
    return this.refresh();
  }

  async submitCertainty(agreement: number, certainty: number): Promise<Snapshot | null> {
    const question = this.snapshot?.question;
    if (this.stage !== 'certainty' || !question || !('statement' in question)) {
      return this.reject('not on a certainty question');
    }
    const problem = validateSlider(agreement) ?? validateCertainty(certainty);
    if (problem) return this.reject(problem);
    await this.client.answerCertainty(this.subjectId, question.block, agreement, certainty);
    return this.refresh();
  }

  async submitDemographics(answers: Record<string, string>): Promise<Snapshot | null> {
    const fields = this.snapshot?.fields;
    if (this.stage !== 'demographics' || !fields) {
      return this.reject('not on the demographics screen');
    }
    const problem = validateDemographics(answers, fields);
    if (problem) return this.reject(problem);
    await this.client.answerDemographics(this.subjectId, answers);
    return this.refresh();
  }

  async ackDebrief(): Promise<Snapshot | null> {
    if (this.stage !== 'debrief') return this.reject('not on the debrief screen');
    await this.client.ackDebrief(this.subjectId);
    return this.refresh();
  }
}
