import type {
  CertaintyView,
  Snapshot,
  TimePrefView,
  TrustView,
} from './types';

/** Pure renderers: snapshot in, HTML string out. Everything displayed comes
 * from the server snapshot; no client-side copies of question text. */

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

function isTrustView(q: TimePrefView | TrustView | CertaintyView): q is TrustView {
  return 'labels' in q;
}

function isCertaintyView(q: TimePrefView | TrustView | CertaintyView): q is CertaintyView {
  return 'statement' in q;
}

export function renderInstructions(snapshot: Snapshot): string {
  const view = snapshot.instructions;
  if (!view) throw new Error('snapshot has no instructions payload');
  const [lo, hi] = view.reward_range;
  return [
    '<section class="screen screen-instructions">',
    `  <p>${escapeHtml(view.text)}</p>`,
    `  <p class="reward-note">Reward range: $${lo}–$${hi}</p>`,
    '  <button data-action="ack-instructions">I understand</button>',
    '</section>',
  ].join('\n');
}

export function renderGame(snapshot: Snapshot): string {
  const game = snapshot.game;
  if (!game) throw new Error('snapshot has no game payload');
  const practice = snapshot.stage === 'practice';
  const header =
    `<h2>${practice ? 'Practice round' : `Round ${game.round_index} of ${game.total_rounds - 1}`}</h2>`;
  const lines = [
    '<section class="screen screen-game">',
    `  ${header}`,
    `  <p class="payoff">Cumulative payoff: $${game.cumulative_payoff}</p>`,
  ];
  if (game.awaiting === 'send') {
    lines.push(
      '  <p>You are Participant A. How much of your $10 do you send?</p>',
      `  <input type="number" name="amount" min="0" max="${game.max_send}" step="1" />`,
      '  <button data-action="send">Send</button>',
    );
  } else {
    lines.push(
      `  <p>You are Participant B. The other participant sent $${game.received},` +
        ` tripled to $${game.tripled}. How much do you return?</p>`,
      `  <input type="number" name="amount" min="0" max="${game.max_return}" step="1" />`,
      '  <button data-action="return">Return</button>',
    );
  }
  lines.push('</section>');
  return lines.join('\n');
}

export function renderTimePref(snapshot: Snapshot): string {
  const view = snapshot.question as TimePrefView | undefined;
  if (!view || !('options' in view)) throw new Error('snapshot has no time-preference payload');
  const buttons = view.options
    .map(
      (option) =>
        `  <button data-action="choose" data-choice="${option.choice}">` +
        `${escapeHtml(option.text)}</button>`,
    )
    .join('\n');
  return [
    '<section class="screen screen-time-pref">',
    `  <p class="progress">Question ${view.position + 1} of ${view.total}</p>`,
    `  <p>${escapeHtml(view.prompt)}</p>`,
    buttons,
    '</section>',
  ].join('\n');
}

export function renderTrust(snapshot: Snapshot): string {
  const view = snapshot.question;
  if (!view || !isTrustView(view)) throw new Error('snapshot has no trust payload');
  const ticks = Object.entries(view.labels)
    .map(([value, label]) => `  <span data-tick="${value}">${escapeHtml(label)}</span>`)
    .join('\n');
  return [
    '<section class="screen screen-trust">',
    `  <p class="progress">Question ${view.position + 1} of ${view.total}</p>`,
    `  <p>${escapeHtml(view.text)}</p>`,
    `  <input type="range" name="value" min="${view.scale.min}" max="${view.scale.max}" step="1" />`,
    ticks,
    '  <button data-action="answer-trust">Next</button>',
    '</section>',
  ].join('\n');
}

export function renderCertainty(snapshot: Snapshot): string {
  const view = snapshot.question;
  if (!view || !isCertaintyView(view)) throw new Error('snapshot has no certainty payload');
  return [
    '<section class="screen screen-certainty">',
    `  <p>${escapeHtml(view.statement)}</p>`,
    `  <input type="range" name="agreement" min="${view.agreement_scale.min}"` +
      ` max="${view.agreement_scale.max}" step="1" />`,
    `  <p>${escapeHtml(view.certainty_prompt)}</p>`,
    `  <input type="range" name="certainty" min="${view.certainty_scale.min}"` +
      ` max="${view.certainty_scale.max}" step="1" />`,
    '  <button data-action="answer-certainty">Next</button>',
    '</section>',
  ].join('\n');
}

export function renderDemographics(snapshot: Snapshot): string {
  const fields = snapshot.fields;
  if (!fields) throw new Error('snapshot has no demographics payload');
  const selects = Object.entries(fields)
    .map(([name, categories]) => {
      const options = categories
        .map((c) => `    <option value="${c}">${escapeHtml(c.replace(/_/g, ' '))}</option>`)
        .join('\n');
      return [`  <label>${escapeHtml(name.replace(/_/g, ' '))}`,
              `  <select name="${name}">`, options, '  </select></label>'].join('\n');
    })
    .join('\n');
  return [
    '<section class="screen screen-demographics">',
    selects,
    '  <button data-action="submit-demographics">Submit</button>',
    '</section>',
  ].join('\n');
}

export function renderDebrief(snapshot: Snapshot): string {
  const view = snapshot.debrief;
  if (!view) throw new Error('snapshot has no debrief payload');
  return [
    '<section class="screen screen-debrief">',
    `  <p>${escapeHtml(view.text)}</p>`,
    `  <p class="treatment">Your condition: ${view.treatment.replace('_', ' ')}</p>`,
    '  <button data-action="ack-debrief">Acknowledge and finish</button>',
    '</section>',
  ].join('\n');
}

export function renderDone(snapshot: Snapshot): string {
  return [
    '<section class="screen screen-done">',
    `  <p>Session complete. Thank you, ${snapshot.subject_id}.</p>`,
    '</section>',
  ].join('\n');
}

export function renderScreen(snapshot: Snapshot): string {
  switch (snapshot.stage) {
    case 'instructions':
      return renderInstructions(snapshot);
    case 'practice':
    case 'game':
      return renderGame(snapshot);
    case 'time_pref':
      return renderTimePref(snapshot);
    case 'trust':
      return renderTrust(snapshot);
    case 'certainty':
      return renderCertainty(snapshot);
    case 'demographics':
      return renderDemographics(snapshot);
    case 'debrief':
      return renderDebrief(snapshot);
    case 'done':
      return renderDone(snapshot);
  }
}
