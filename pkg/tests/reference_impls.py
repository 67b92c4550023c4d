"""Brute-force reference implementations used as oracles by the test suite.

Everything here is deliberately slow and written from the metric/statistic
definitions directly, without sharing code with the package. Keep it that way:
these functions are what the fast implementations are judged against.
"""

import math

# Same fixed suffix table the package documents for its stemmer; duplicated
# here on purpose so the oracle does not import the implementation.
_SUFFIXES = (
    "ements", "ement", "ations", "ation", "ings", "ing", "ers", "ies",
    "ied", "est", "ed", "er", "ly", "es", "s",
)


def stem_ref(word):
    for suffix in _SUFFIXES:
        if word.endswith(suffix) and len(word) - len(suffix) >= 3:
            return word[: -len(suffix)]
    return word


def bleu_ref(candidate, reference):
    """Sentence BLEU, 1-4 grams, geometric mean, brevity penalty.

    The i-th zero precision (counting from 1) is replaced by
    1 / (2**i * (5 / ln(len(candidate)))) when the candidate has more than
    one token; a surviving zero precision makes the score 0.
    """
    if not candidate or not reference:
        raise ValueError("empty input")
    fractions = []
    for n in range(1, 5):
        cand_grams = [tuple(candidate[i : i + n]) for i in range(len(candidate) - n + 1)]
        ref_grams = [tuple(reference[i : i + n]) for i in range(len(reference) - n + 1)]
        pool = list(ref_grams)
        matched = 0
        for gram in cand_grams:
            if gram in pool:
                pool.remove(gram)
                matched += 1
        fractions.append((matched, max(len(cand_grams), 1)))
    values = []
    zeros_seen = 0
    for num, den in fractions:
        if num == 0:
            if len(candidate) > 1:
                zeros_seen += 1
                values.append(1.0 / (2 ** zeros_seen * (5.0 / math.log(len(candidate)))))
            else:
                values.append(0.0)
        else:
            values.append(num / den)
    if any(v == 0.0 for v in values):
        return 0.0
    if len(candidate) > len(reference):
        bp = 1.0
    else:
        bp = math.exp(1.0 - len(reference) / len(candidate))
    return bp * math.exp(sum(math.log(v) for v in values) / 4.0)


def rouge1_ref(candidate, reference):
    if not candidate or not reference:
        raise ValueError("empty input")
    pool = list(reference)
    matched = 0
    for tok in candidate:
        if tok in pool:
            pool.remove(tok)
            matched += 1
    p = matched / len(candidate)
    r = matched / len(reference)
    if p + r == 0:
        return 0.0
    return 2 * p * r / (p + r)


def _lcs_recursive(a, b, i, j, memo):
    if i == len(a) or j == len(b):
        return 0
    key = (i, j)
    if key not in memo:
        if a[i] == b[j]:
            memo[key] = 1 + _lcs_recursive(a, b, i + 1, j + 1, memo)
        else:
            memo[key] = max(
                _lcs_recursive(a, b, i + 1, j, memo),
                _lcs_recursive(a, b, i, j + 1, memo),
            )
    return memo[key]


def rougeL_ref(candidate, reference):
    if not candidate or not reference:
        raise ValueError("empty input")
    lcs = _lcs_recursive(tuple(candidate), tuple(reference), 0, 0, {})
    p = lcs / len(candidate)
    r = lcs / len(reference)
    if p + r == 0:
        return 0.0
    return 2 * p * r / (p + r)


def meteor_ref(candidate, reference, alpha=0.9, beta=3.0, gamma=0.5):
    """Two-stage greedy alignment (exact, then stemmed), F-mean and chunk penalty.

    Stage semantics: walk candidate tokens left to right; each matches the
    leftmost unused reference token with an equal key. Stage one compares
    surface forms, stage two compares stems of the leftovers.
    """
    if not candidate or not reference:
        raise ValueError("empty input")
    cand_used = [False] * len(candidate)
    ref_used = [False] * len(reference)
    matches = []
    for key in (lambda w: w, stem_ref):
        for i, ctok in enumerate(candidate):
            if cand_used[i]:
                continue
            for j, rtok in enumerate(reference):
                if ref_used[j]:
                    continue
                if key(ctok) == key(rtok):
                    cand_used[i] = True
                    ref_used[j] = True
                    matches.append((i, j))
                    break
    m = len(matches)
    if m == 0:
        return 0.0
    p = m / len(candidate)
    r = m / len(reference)
    f = p * r / (alpha * p + (1 - alpha) * r)
    matches.sort()
    chunks = 1
    for (ci, ri), (cj, rj) in zip(matches, matches[1:]):
        if not (cj == ci + 1 and rj == ri + 1):
            chunks += 1
    penalty = gamma * (chunks / m) ** beta
    return f * (1.0 - penalty)


def cer_ref(code, candidate, reference):
    """|code ∩ cand ∩ ref| / |code ∩ ref| over lowercased unigram sets.

    Returns None when the denominator set is empty.
    """
    code_set = {t.lower() for t in code}
    cand_set = {t.lower() for t in candidate}
    ref_set = {t.lower() for t in reference}
    denom = code_set & ref_set
    if not denom:
        return None
    return len(denom & cand_set) / len(denom)


def kendall_ref(metric_scores, human_scores):
    """Classify every unordered pair and count (con, dis, tie, dropped).

    A pair with equal human scores is dropped; equal metric scores with
    unequal human scores is a tie; otherwise the pair is concordant when the
    two orderings agree and discordant when they disagree.
    """
    assert len(metric_scores) == len(human_scores)
    con = dis = tie = dropped = 0
    n = len(metric_scores)
    for i in range(n):
        for j in range(i + 1, n):
            hi, hj = human_scores[i], human_scores[j]
            mi, mj = metric_scores[i], metric_scores[j]
            if hi == hj:
                dropped += 1
            elif mi == mj:
                tie += 1
            elif (hi < hj) == (mi < mj):
                con += 1
            else:
                dis += 1
    return con, dis, tie, dropped


def kendall_tau_ref(metric_scores, human_scores):
    con, dis, tie, _ = kendall_ref(metric_scores, human_scores)
    if con + dis + tie == 0:
        return None
    return abs(con - dis) / (con + dis + tie)


def levenshtein_ref(a, b):
    """Memoized recursive edit distance (insert/delete/substitute, unit cost)."""
    memo = {}

    def go(i, j):
        if i == len(a):
            return len(b) - j
        if j == len(b):
            return len(a) - i
        key = (i, j)
        if key not in memo:
            if a[i] == b[j]:
                memo[key] = go(i + 1, j + 1)
            else:
                memo[key] = 1 + min(go(i + 1, j), go(i, j + 1), go(i + 1, j + 1))
        return memo[key]

    return go(0, 0)


def pad_targets(targets):
    """(chars, lens) arrays for levenshtein_to_many: one row per target,
    right-padded with -1. Build once, reuse across queries."""
    import numpy as np

    lens = np.array([len(t) for t in targets], dtype=np.int64)
    maxlen = int(lens.max()) if len(targets) else 0
    chars = np.full((len(targets), maxlen), -1, dtype=np.int64)
    for b, t in enumerate(targets):
        if t:
            chars[b, : len(t)] = np.frombuffer(t.encode("utf-32-le"), dtype=np.uint32)
    return chars, lens


def levenshtein_to_many(query, chars, lens):
    """Edit distance from one string to many pre-padded targets.

    Batched full DP with no pruning. The in-row insertion chain is resolved
    with a running minimum (dp[j] = min over k<=j of m[k] + (j-k)), which
    makes each DP row vectorizable across every target at once.
    """
    import numpy as np

    batch, maxlen = chars.shape
    cols = np.arange(1, maxlen + 1, dtype=np.int64)
    dp = np.tile(np.arange(maxlen + 1, dtype=np.int64), (batch, 1))
    for i, ch in enumerate(query, start=1):
        sub_cost = np.where(chars == ord(ch), 0, 1)
        m = np.minimum(dp[:, 1:] + 1, dp[:, :-1] + sub_cost)
        head = np.full((batch, 1), i, dtype=np.int64)
        u = np.minimum.accumulate(np.concatenate([head, m - cols], axis=1), axis=1)[:, 1:]
        dp = np.concatenate([head, u + cols], axis=1)
    return dp[np.arange(batch), lens]


def levenshtein_matrix_ref(query, targets):
    """Edit distance from one string to many (convenience wrapper)."""
    import numpy as np

    if not targets:
        return np.zeros(0, dtype=np.int64)
    chars, lens = pad_targets(targets)
    return levenshtein_to_many(query, chars, lens)
