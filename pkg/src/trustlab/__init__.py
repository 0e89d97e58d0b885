"""Trust-game experiment platform: game engine, bot strategies, questionnaires,
discount-rate estimation, OLS analysis, session orchestration, and a simulator."""

__version__ = "0.1.0"
