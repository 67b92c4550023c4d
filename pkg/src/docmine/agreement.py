"""Rank agreement between automatic metrics and human ratings.

Every unordered pair of scored examples is classified by comparing how the
metric and the human scores order the two examples: agreement is concordant,
disagreement discordant, an exact metric tie with distinct human scores is a
tie, and pairs with equal human scores are dropped. The statistic is

    tau = |concordant - discordant| / (concordant + discordant + ties)

The absolute value in the numerator is intentional and means a perfectly
anti-correlated metric also reaches tau = 1; a signed variant exists for
diagnostics but the table export always uses the absolute form.
"""

from dataclasses import dataclass

from .errors import DegenerateInput, JoinError

CONCORDANT = "concordant"
DISCORDANT = "discordant"
TIE = "tie"
DROPPED = "dropped"

ASPECTS = ("a1", "a2", "a3", "a4", "overall")
ASPECT_LABELS = {"a1": "A1", "a2": "A2", "a3": "A3", "a4": "A4", "overall": "Overall"}


@dataclass
class ScoredExample:
    example_id: str
    metric_score: float
    human_score: float


@dataclass
class AgreementResult:
    tau: float
    concordant: int
    discordant: int
    tie: int
    dropped_human_ties: int

    @property
    def compared_pairs(self):
        return self.concordant + self.discordant + self.tie + self.dropped_human_ties


def classify_pair(s1m, s2m, s1h, s2h):
    if s1h == s2h:
        return DROPPED
    if s1m == s2m:
        return TIE
    if (s1h < s2h) == (s1m < s2m):
        return CONCORDANT
    return DISCORDANT


def count_pair_classes(examples):
    con = dis = tie = dropped = 0
    n = len(examples)
    for i in range(n):
        a = examples[i]
        for j in range(i + 1, n):
            b = examples[j]
            kind = classify_pair(a.metric_score, b.metric_score, a.human_score, b.human_score)
            if kind == CONCORDANT:
                con += 1
            elif kind == DISCORDANT:
                dis += 1
            elif kind == TIE:
                tie += 1
            else:
                dropped += 1
    return con, dis, tie, dropped


def tau_from_counts(con, dis, tie, dropped, signed=False):
    denominator = con + dis + tie
    if denominator == 0:
        raise DegenerateInput("no comparable pairs: every human pair is tied")
    numerator = (con - dis) if signed else abs(con - dis)
    return AgreementResult(
        tau=numerator / denominator,
        concordant=con,
        discordant=dis,
        tie=tie,
        dropped_human_ties=dropped,
    )


def kendall_tau(examples, signed=False):
    """Adapted Kendall's tau over all n*(n-1)/2 unordered example pairs."""
    examples = list(examples)
    if len(examples) < 2:
        raise DegenerateInput("need at least two scored examples")
    con, dis, tie, dropped = count_pair_classes(examples)
    return tau_from_counts(con, dis, tie, dropped, signed=signed)


def join_rows(metric_rows, human_rows):
    """Match metric reports with human ratings on (example_id, system).

    Metric rows may carry their key as pair_id or example_id. Raises
    JoinError listing the unmatched keys when nothing joins.
    """
    def metric_key(row):
        return (row.get("example_id") or row.get("pair_id"), row.get("system", "default"))

    human_by_key = {}
    for row in human_rows:
        human_by_key[(row["example_id"], row.get("system", "default"))] = row

    joined = []
    unmatched_metric = []
    for row in metric_rows:
        key = metric_key(row)
        human = human_by_key.get(key)
        if human is None:
            unmatched_metric.append(key)
            continue
        joined.append((key, row, human))
    if not joined:
        matched_keys = set()
        raise JoinError(unmatched_metric, set(human_by_key) - matched_keys)
    return joined


def agreement_table(metric_rows, human_rows, metric_fields, within_system=False, signed=False):
    """tau per (metric, aspect) over the joined rows.

    Pairs pool across every joined (example, system) row by default; with
    within_system=True only rows from the same system form pairs and the
    class counts are summed across systems before tau is taken. Cells are
    None when a metric has no comparable pairs.
    """
    joined = join_rows(metric_rows, human_rows)
    table = {}
    for metric in metric_fields:
        table[metric] = {}
        for aspect in ASPECTS:
            examples = [
                (key[1], ScoredExample(example_id=key[0],
                                       metric_score=row[metric],
                                       human_score=human[aspect]))
                for key, row, human in joined
                if row.get(metric) is not None and human.get(aspect) is not None
            ]
            if within_system:
                counts = [0, 0, 0, 0]
                by_system = {}
                for system, example in examples:
                    by_system.setdefault(system, []).append(example)
                for system in sorted(by_system):
                    group = by_system[system]
                    if len(group) < 2:
                        continue
                    for value, part in zip(count_pair_classes(group), range(4)):
                        counts[part] += value
                con, dis, tie, dropped = counts
            elif len(examples) >= 2:
                con, dis, tie, dropped = count_pair_classes([e for _, e in examples])
            else:
                con = dis = tie = dropped = 0
            try:
                result = tau_from_counts(con, dis, tie, dropped, signed=signed)
            except DegenerateInput:
                table[metric][aspect] = None
                continue
            table[metric][aspect] = result
    return table


def table_to_csv_rows(table, metric_fields):
    """Rows shaped like the metric/aspect agreement table: one row per
    metric, one column per aspect."""
    header = ["metric"] + [ASPECT_LABELS[a] for a in ASPECTS]
    rows = [header]
    for metric in metric_fields:
        row = [metric]
        for aspect in ASPECTS:
            cell = table[metric][aspect]
            row.append("" if cell is None else f"{cell.tau:.6f}")
        rows.append(row)
    return rows
