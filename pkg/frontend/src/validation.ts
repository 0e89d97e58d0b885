import type { GameView, Scale } from './types';

export const SEND_MIN = 0;
export const SEND_MAX = 10;
export const SLIDER_MIN = -50;
export const SLIDER_MAX = 50;
export const CERTAINTY_MIN = 0;
export const CERTAINTY_MAX = 100;

/** Mirrors the server's pre-submit checks so the UI can reject locally
 * with the same bounds the server enforces. The server stays authoritative. */

function isInteger(value: number): boolean {
  return Number.isInteger(value) && typeof value === 'number';
}

export function validateSend(amount: number): string | null {
  if (!isInteger(amount)) return 'send must be a whole dollar amount';
  if (amount < SEND_MIN || amount > SEND_MAX) {
    return `send ${amount} outside [${SEND_MIN}, ${SEND_MAX}]`;
  }
  return null;
}

export function validateReturn(amount: number, tripled: number): string | null {
  if (!isInteger(amount)) return 'return must be a whole dollar amount';
  if (amount < 0 || amount > tripled) {
    return `return ${amount} outside [0, ${tripled}]`;
  }
  return null;
}

export function validateSlider(value: number, scale: Scale = { min: SLIDER_MIN, max: SLIDER_MAX }): string | null {
  if (!isInteger(value)) return 'slider value must be an integer';
  if (value < scale.min || value > scale.max) {
    return `slider value ${value} outside [${scale.min}, ${scale.max}]`;
  }
  return null;
}

export function validateCertainty(value: number): string | null {
  return validateSlider(value, { min: CERTAINTY_MIN, max: CERTAINTY_MAX });
}

export function validateChoice(choice: string): string | null {
  return choice === 'present' || choice === 'future'
    ? null
    : `choice must be 'present' or 'future', got '${choice}'`;
}

export function validateGameMove(game: GameView, amount: number): string | null {
  if (game.awaiting === 'send') return validateSend(amount);
  return validateReturn(amount, game.tripled ?? 0);
}

export function validateDemographics(
  answers: Record<string, string>,
  fields: Record<string, string[]>,
): string | null {
  for (const [name, categories] of Object.entries(fields)) {
    const value = answers[name];
    if (value === undefined) return `missing demographic field: ${name}`;
    if (!categories.includes(value)) return `${name}: '${value}' is not an option`;
  }
  for (const name of Object.keys(answers)) {
    if (!(name in fields)) return `unknown demographic field: ${name}`;
  }
  return null;
}
