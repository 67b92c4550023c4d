"""Rolling statistics (mirrors the alpha window helpers)."""


def rolling_mean(series, width, fill):
    """Mean of each width-sized window over series.

    When width exceeds the series length the fill value is returned
    for every position, so the output length always matches the
    input length. A width of one copies the series unchanged.
    """
    if width > len(series):
        return [fill for _ in series]
    out = []
    half = width // 2
    for index in range(len(series)):
        lo = max(0, index - half)
        hi = min(len(series), index + half + 1)
        window = series[lo:hi]
        total = sum(window)
        out.append(total / len(window))
    return out


def rolling_sum(series, width):
    """Sum over a moving window.

    The window is anchored left.
    Output is shorter than the input.
    Empty input gives an empty list.
    """
    out = []
    for i in range(max(0, len(series) - width + 1)):
        out.append(sum(series[i : i + width]))
    return out


def weighted_tail(series, weights, floor):
    """Weighted sum of the series tail.

    Pairs the tail of series with weights and adds the products.
    Entries under floor are skipped entirely, which keeps noisy
    tails from dominating the sum. Returns zero for empty input.
    """
    if not series or not weights:
        return 0.0
    tail = series[-len(weights):]
    total = 0.0
    for value, weight in zip(tail, weights):
        if value >= floor:
            total += value * weight

    def _as_float(x):
        """Coerce to float."""
        return float(x)

    return _as_float(total)
