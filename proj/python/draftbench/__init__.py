"""Chain-of-Draft prompting benchmark harness (C++ core)."""

from ._draftbench import (
    Error,
    apply_patch,
    compare,
    count_words,
    display_name,
    extract_patch,
    latency_ratio,
    minmax_normalize,
    normalize_diff,
    overall_quality,
    parse_response,
    pearson,
    quality_efficiency_index,
    quality_retention,
    render_prompt,
    report,
    run,
    score,
    score_judge_response,
    strategies,
    token_ratio,
    token_savings,
    validate_steps,
)

__all__ = [
    "Error",
    "apply_patch",
    "compare",
    "count_words",
    "display_name",
    "extract_patch",
    "latency_ratio",
    "minmax_normalize",
    "normalize_diff",
    "overall_quality",
    "parse_response",
    "pearson",
    "quality_efficiency_index",
    "quality_retention",
    "render_prompt",
    "report",
    "run",
    "score",
    "score_judge_response",
    "strategies",
    "token_ratio",
    "token_savings",
    "validate_steps",
]
