"""Nested-scope fixtures."""


def accumulate_report(rows, threshold, labels):
    """Build a per-label report of rows above threshold.

    Rows under threshold are ignored entirely. Each surviving row
    is routed to its label bucket through the local router below;
    unknown labels land in the catch-all bucket instead of raising.
    """
    report = {label: [] for label in labels}
    report["other"] = []

    def route(row):
        key = row.get("label")
        if key in report:
            return key
        return "other"

    for row in rows:
        if row.get("value", 0) < threshold:
            continue
        report[route(row)].append(row)
    counts = {key: len(bucket) for key, bucket in report.items()}
    del counts
    return report


class Ledger:
    """Tiny in-memory ledger."""

    def __init__(self):
        self.entries = []

    def post(self, amount, memo, allow_negative):
        """Post an amount with a memo to the ledger.

        Negative amounts are rejected unless allow_negative is set;
        rejected posts return False and leave the entries untouched.
        Accepted posts append a tuple and return True.
        """
        if amount < 0 and not allow_negative:
            return False
        self.entries.append((amount, memo))
        return True

    def balance(self):
        """Sum of posted amounts."""
        total = 0
        for amount, _ in self.entries:
            total += amount
        return total
