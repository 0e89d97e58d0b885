import { describe, expect, it } from 'vitest';

import {
  validateCertainty,
  validateChoice,
  validateDemographics,
  validateGameMove,
  validateReturn,
  validateSend,
  validateSlider,
} from '../src/validation';
import { errorFixtures, fixture } from './fixtures';
import type { GameView, Snapshot } from '../src/types';

const errors = errorFixtures();

describe('client bounds match recorded server rejections', () => {
  it('rejects an over-endowment send with the same message as the server', () => {
    expect(validateSend(11)).toBe(errors.send_too_large.body.detail);
  });

  it('rejects an over-tripled return with the same message as the server', () => {
    // The server rejected return=99 in the practice round, where 3x = 15.
    expect(validateReturn(99, 15)).toBe(errors.return_too_large.body.detail);
  });

  it('rejects an out-of-range trust slider with the same message', () => {
    expect(validateSlider(51)).toBe(errors.slider_out_of_range.body.detail);
  });

  it('rejects an out-of-range certainty value with the same message', () => {
    expect(validateCertainty(101)).toBe(errors.certainty_out_of_range.body.detail);
  });

  it('rejects the same invalid binary choice the server rejects', () => {
    expect(validateChoice('maybe')).not.toBeNull();
    expect(validateChoice('present')).toBeNull();
    expect(validateChoice('future')).toBeNull();
  });
});

describe('boundary agreement', () => {
  it('accepts the full inclusive send range 0..10 and nothing else', () => {
    for (let amount = 0; amount <= 10; amount++) expect(validateSend(amount)).toBeNull();
    expect(validateSend(-1)).not.toBeNull();
    expect(validateSend(11)).not.toBeNull();
    expect(validateSend(5.5)).not.toBeNull();
  });

  it('accepts returns up to 3x inclusive', () => {
    expect(validateReturn(0, 21)).toBeNull();
    expect(validateReturn(21, 21)).toBeNull();
    expect(validateReturn(22, 21)).not.toBeNull();
  });

  it('accepts sliders on [-50, 50] and certainty on [0, 100] inclusive', () => {
    expect(validateSlider(-50)).toBeNull();
    expect(validateSlider(50)).toBeNull();
    expect(validateSlider(-51)).not.toBeNull();
    expect(validateCertainty(0)).toBeNull();
    expect(validateCertainty(100)).toBeNull();
    expect(validateCertainty(-1)).not.toBeNull();
  });

  it('uses the live snapshot bound for the awaited move', () => {
    const sendView = fixture('state_game_send').game as GameView;
    const returnView = fixture('state_game_return').game as GameView;
    expect(validateGameMove(sendView, 10)).toBeNull();
    expect(validateGameMove(sendView, 11)).not.toBeNull();
    expect(validateGameMove(returnView, returnView.tripled!)).toBeNull();
    expect(validateGameMove(returnView, returnView.tripled! + 1)).not.toBeNull();
  });
});

describe('demographics validation', () => {
  const snapshot: Snapshot = fixture('state_demographics');
  const fields = snapshot.fields!;
  const complete: Record<string, string> = Object.fromEntries(
    Object.entries(fields).map(([name, categories]) => [name, categories[0]!]),
  );

  it('accepts a complete, categorical answer set', () => {
    expect(validateDemographics(complete, fields)).toBeNull();
  });

  it('rejects missing and unknown fields and off-list values', () => {
    const { gender: _gender, ...partial } = complete;
    expect(validateDemographics(partial, fields)).toContain('missing');
    expect(validateDemographics({ ...complete, extra: 'x' }, fields)).toContain('unknown');
    expect(validateDemographics({ ...complete, major: 'astrology' }, fields)).toContain('major');
  });
});
