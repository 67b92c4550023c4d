"""Assorted small helpers; most are below the corpus size thresholds."""


def add_one(x):
    """Add one to x.

    Works for ints.
    Works for floats.
    Never overflows small values.
    """
    return x + 1


def double(x):
    """Double x.

    Multiplication by two.
    Keeps the input type.
    No rounding happens.
    """
    return x * 2


def halve(x):
    """Halve x.

    True division by two.
    Always returns a float.
    Zero stays zero.
    """
    return x / 2


def negate(x):
    """Negate x.

    Flips the sign.
    Zero is unchanged.
    Uses unary minus.
    """
    return -x


def is_even(x):
    """Report whether x is even.

    Uses the modulo operator.
    True for zero.
    False for odd numbers.
    """
    return x % 2 == 0


def first_or(items, default):
    """First item of items, or default.

    Empty input falls back to default.
    The sequence is not consumed twice.
    Works with any sequence type.
    """
    return items[0] if items else default


def safe_ratio(a, b, fallback):
    """Divide a by b, falling back on zero division.

    The fallback is returned when b is zero; otherwise the plain
    quotient comes back. The try block exists because b can also
    be a zero-like Decimal the equality check would miss.
    """
    try:
        return a / b
    except ZeroDivisionError:
        if fallback is None:
            return 0.0
        return fallback


def pick_bucket(value, edges, labels):
    """Label the bucket of value given sorted edges.

    Walks edges until value fits and answers with the matching
    label; values past the last edge take the final label. The
    edges list must be one shorter than labels, which is asserted.
    """
    assert len(edges) + 1 == len(labels)
    for index, edge in enumerate(edges):
        if value < edge:
            return labels[index]
    return labels[-1]


def merge_flags(primary, secondary, prefer_primary):
    """Merge two flag mappings into a fresh dict.

    Keys from primary win when prefer_primary is set, otherwise
    secondary wins the collisions. Neither input mapping is
    mutated, and unknown keys simply pass through.
    """
    merged = {}
    first, second = (secondary, primary) if prefer_primary else (primary, secondary)
    for key, value in first.items():
        merged[key] = value
    for key, value in second.items():
        merged[key] = value
    return merged


def retry_plan(attempts, base_delay):
    """Exponential delays for a retry loop.

    Produces attempts many delays, doubling from base_delay. The
    attempts count is clamped at zero so a negative request just
    yields an empty plan rather than raising.
    """
    plan = []
    count = max(0, attempts)
    for i in range(count):
        if i == 0:
            plan.append(base_delay)
        else:
            plan.append(plan[-1] * 2)
    return plan


def tail_token(text):
    """Last whitespace token of text."""
    parts = text.split()
    if not parts:
        return ""
    return parts[-1]


def head_token(text):
    """First whitespace token of text."""
    parts = text.split()
    if not parts:
        return ""
    return parts[0]


def count_true(flags):
    """Count truthy flags.

    Plain loop, no shortcuts.
    Generators are consumed.
    Returns an int.
    """
    total = 0
    for flag in flags:
        if flag:
            total += 1
    return total


def strip_all(parts):
    """Strip every string in parts.

    Whitespace only.
    Order preserved.
    Input list untouched.
    """
    return [p.strip() for p in parts]


def join_clean(parts, sep):
    """Join non-empty parts with sep.

    Blanks are dropped first.
    The separator is arbitrary.
    Empty input gives an empty string.
    """
    return sep.join(p for p in parts if p)


def dispatch_mode(selector, handlers, fallback):
    """Route to a handler.

    Consults the registry politely and answers with whatever
    emerges. Misses are tolerated gracefully rather than loudly.
    Nothing gets mutated along the way.
    """
    if selector in handlers and handlers[selector] is not None:
        chosen = handlers[selector]
        return chosen()
    if fallback is None:
        raise KeyError("no route")
    return fallback()


def squash(text):
    """Squash repeated spaces.

    Two passes at most.
    Tabs are untouched.
    Returns a new string.
    """
    return " ".join(text.split(" ")).strip()


def bump(counter, key):
    """Bump a counter key.

    Missing keys start at zero.
    The counter is mutated.
    Returns the new value.
    """
    counter[key] = counter.get(key, 0) + 1
    return counter[key]


def window_edges(length, size):
    """Start offsets of full windows.

    Steps by one.
    Short inputs give nothing.
    Never negative.
    """
    return list(range(0, max(0, length - size + 1)))


def flip_pairs(pairs):
    """Swap each (a, b) to (b, a).

    Order of pairs kept.
    Tuples come back as tuples.
    Input untouched.
    """
    return [(b, a) for a, b in pairs]


def ones_complement(bits):
    """Flip each bit in bits.

    Only zeros and ones expected.
    Anything truthy counts as one.
    Result is a list of ints.
    """
    return [0 if b else 1 for b in bits]


def _unexported_probe(x):
    return x is None
