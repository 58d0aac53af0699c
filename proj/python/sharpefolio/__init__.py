"""Sharpe-screened portfolio construction, backtesting and alpha search."""

from ._core import (
    PricePanel,
    SharpefolioError,
    backtest,
    blend_weights,
    evolve,
    load_panel,
    max_drawdown,
    metrics,
    normalize_alpha,
    score_alpha,
    select_universe,
    sharpe,
    solve_mean_variance,
    synthetic_panel,
    write_panel,
)

__all__ = [
    "PricePanel",
    "SharpefolioError",
    "backtest",
    "blend_weights",
    "evolve",
    "load_panel",
    "max_drawdown",
    "metrics",
    "normalize_alpha",
    "score_alpha",
    "select_universe",
    "sharpe",
    "solve_mean_variance",
    "synthetic_panel",
    "write_panel",
]
