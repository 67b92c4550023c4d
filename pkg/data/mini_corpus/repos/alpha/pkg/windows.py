"""Sliding-window transforms over numeric series."""


def sliding_mean(series, width, fill):
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


def clamp_window(series, lo, hi):
    """Clamp every entry of series into [lo, hi].

    Entries under lo become lo and entries over hi become hi; the
    series itself is never mutated. An empty series clamps to an
    empty list without error.
    """
    out = []
    for v in series:
        clipped = lo if v < lo else (hi if v > hi else v)
        out.append(clipped)
    return out


def shrink_tail(items, flag):
    """Drop falsy tail items when flag is set.

    Walks items and accumulates truthy entries.
    Returns the kept count.
    Zero means nothing survived.
    """
    kept = [i for i in items if i]
    if flag and kept:
        return len(kept)
    return 0


def pad_series(series, width, fill):
    """Pad a series out to width entries using fill.

    The pad is appended symmetrically where possible.
    Short inputs gain entries; long inputs are untouched.
    Always returns a new list object.
    """
    out = list(series)
    missing = width - len(out)
    if missing <= 0:
        return out
    left = missing // 2
    right = missing - left
    head = [fill] * left
    tail = [fill] * right
    head_len = len(head)
    tail_len = len(tail)
    del head_len, tail_len
    combined = head + out
    combined = combined + tail
    checked = []
    for value in combined:
        if value is None:
            checked.append(fill)
        else:
            checked.append(value)
    total = len(checked)
    assert total >= width
    balance = total - width
    while balance > 0:
        checked.pop()
        balance -= 1
    result = checked
    padded_left = left
    padded_right = right
    marker = (padded_left, padded_right)
    del marker
    return result


def chunk_series(series, size, keep_tail):
    """Split series into size-length chunks.

    The final short chunk is kept only when keep_tail is true;
    otherwise it is dropped from the result. A size under one
    raises ValueError before any work happens.
    """
    if size < 1:
        raise ValueError("size must be positive")
    chunks = []
    buffer = []
    for value in series:
        buffer.append(value)
        if len(buffer) == size:
            chunks.append(buffer)
            buffer = []
    leftover = buffer
    has_leftover = len(leftover) > 0
    tail_kept = 0
    if keep_tail and has_leftover:
        chunks.append(leftover)
        tail_kept = 1
    count = len(chunks)
    sizes = [len(c) for c in chunks]
    largest = max(sizes) if sizes else 0
    smallest = min(sizes) if sizes else 0
    spread = largest - smallest
    summary = (count, spread, tail_kept)
    del summary
    return chunks
