#!/usr/bin/env python3
"""
Profiling utilities for the model checker
Wraps a check in cProfile and renders the hottest functions
"""

import cProfile
import io
import pstats
from typing import Any, Callable, Optional, Tuple


def profile_call(func: Callable[..., Any], *args: Any, output_file: Optional[str] = None,
                 **kwargs: Any) -> Tuple[Any, pstats.Stats]:
    """Run func under cProfile; returns (result, stats)"""
    profiler = cProfile.Profile()
    try:
        result = profiler.runcall(func, *args, **kwargs)
    finally:
        if output_file:
            profiler.dump_stats(output_file)
    return result, pstats.Stats(profiler)


def analyze_profile_stats(stats: pstats.Stats, top_n: int = 20, sort_key: str = "cumulative") -> str:
    """Top N functions of a profile as text"""
    output = io.StringIO()
    stats.stream = output
    stats.sort_stats(sort_key)
    stats.print_stats(top_n)
    return output.getvalue()
