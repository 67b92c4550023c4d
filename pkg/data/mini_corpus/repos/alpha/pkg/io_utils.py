"""Small table IO helpers."""

import json


def load_table(path, strict):
    """Load a JSON table from path.

    Returns the rows as a list of dicts. With strict set, a missing
    file raises ValueError; otherwise the loader swallows the
    OSError and hands back an empty rows list instead. A scalar
    payload is wrapped so callers always see a list.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            rows = json.load(fh)
    except OSError as exc:
        if strict:
            raise ValueError(f"cannot read {path}") from exc
        rows = []
    if not isinstance(rows, list):
        rows = [rows]
    return rows


def dump_table(rows, path):
    """Write rows to path as JSON.

    Failures bubble up to the caller.
    The file is truncated first.
    Returns the row count written.
    """
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(rows, fh)
    except OSError:
        return 0
    if not rows:
        return 0
    return len(rows)


def _iter_rows(rows):
    for row in rows:
        yield dict(row)


class Reader:
    """Buffered row reader."""

    def __init__(self, rows):
        self.rows = list(rows)
        self.cursor = 0

    def read(self, count, wrap):
        """Read up to count rows from the cursor.

        When wrap is set and the cursor reaches the end, reading
        continues from the start of the buffer. A count of zero is
        answered with an empty list and leaves the cursor alone.
        """
        if count == 0:
            return []
        out = []
        while len(out) < count and self.rows:
            if self.cursor >= len(self.rows):
                if not wrap:
                    break
                self.cursor = 0
            out.append(self.rows[self.cursor])
            self.cursor += 1
        return out

    def close(self):
        """Release the buffer."""
        self.rows = []
