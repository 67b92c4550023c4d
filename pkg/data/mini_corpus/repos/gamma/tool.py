"""Low-star repo; the default star floor keeps this out of the corpus."""


def hidden_gem(values, floor):
    """Filter values by floor.

    Values under floor are dropped.
    The rest keep their order.
    Never mutates the input.
    """
    kept = []
    for value in values:
        if value >= floor:
            kept.append(value)
    return kept
