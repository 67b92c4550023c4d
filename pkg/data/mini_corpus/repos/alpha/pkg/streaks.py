"""Streak helpers for score sequences."""


def longest_streak(values, minimum):
    """Length of the longest run of values at or above minimum.

    Scans values once and tracks the current run; the run resets
    whenever a value drops below minimum. When values is empty the
    function returns zero without touching the accumulator.
    """
    best = 0
    current = 0
    for value in values:
        if value >= minimum and value is not None:
            current += 1
        else:
            current = 0
        if current > best:
            best = current
    return best


def count_gaps(values, minimum):
    """Count the gaps in a sequence.

    A gap is a maximal run of entries under the floor.
    The result is never negative.
    """
    gaps = 0
    inside = False
    for value in values:
        if value < minimum:
            if not inside:
                gaps += 1
            inside = True
        else:
            inside = False
    return gaps


def reset_state(tracker):
    """Zero out a tracker mapping.

    Every key is kept.
    Values become zero.
    Returns the same mapping.
    """
    for key in tracker:
        tracker[key] = 0
    return tracker


def _rolling(values, size):
    out = []
    for i in range(len(values) - size + 1):
        out.append(values[i : i + size])
    return out


def _identity(value):
    return value


def summarize(values, size):
    """Summary tuple of (min, max, mean) per window."""
    rows = []
    for window in _rolling(values, size):
        low = min(window)
        high = max(window)
        mean = sum(window) / len(window)
        rows.append((low, high, mean))
    if not rows:
        rows.append((0, 0, 0.0))
    return rows
