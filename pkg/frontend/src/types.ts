export type Stage =
  | 'instructions'
  | 'practice'
  | 'game'
  | 'time_pref'
  | 'trust'
  | 'certainty'
  | 'demographics'
  | 'debrief'
  | 'done';

export interface Scale {
  min: number;
  max: number;
}

export interface GameView {
  round_index: number;
  total_rounds: number;
  cumulative_payoff: number;
  awaiting: 'send' | 'return';
  wait_seconds: number;
  role: 'A' | 'B';
  max_send?: number;
  received?: number;
  tripled?: number;
  max_return?: number;
}

export interface TimePrefOption {
  choice: 'present' | 'future';
  text: string;
}

export interface TimePrefView {
  position: number;
  total: number;
  prompt: string;
  options: TimePrefOption[];
}

export interface TrustView {
  position: number;
  total: number;
  text: string;
  scale: Scale;
  labels: Record<string, string>;
}

export interface CertaintyView {
  block: number;
  statement: string;
  agreement_scale: Scale;
  certainty_prompt: string;
  certainty_scale: Scale;
}

export interface DebriefView {
  treatment: 'high_trust' | 'low_trust';
  text: string;
}

export interface InstructionsView {
  text: string;
  reward_range: [number, number];
}

export interface Snapshot {
  subject_id: string;
  slot: string;
  stage: Stage;
  started: boolean;
  instructions?: InstructionsView;
  game?: GameView;
  question?: TimePrefView | TrustView | CertaintyView;
  fields?: Record<string, string[]>;
  debrief?: DebriefView;
}

export interface Ack {
  subject_id: string;
  stage: string;
}

export interface ApiErrorBody {
  detail: string;
}
