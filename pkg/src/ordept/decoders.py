"""Pattern-testing soft decoders.

ORDEPT tests partial error patterns (PEPs): a PEP leaves one error position
open, and the partial syndrome s ^ h_{j0} ^ ... picks that position through a
syndrome-to-column lookup. Two stopping rules are provided, likelihood
thresholding on the analog weight and SOGRAND's not-in-list probability.
ORBGRAND and list-ORBGRAND test the same patterns as complete error patterns.

All decoders take ``patterns`` as a sequence of 0-based rank tuples, the form
returned by :func:`ordept.patterns.pattern_table`; ``None`` uses that table.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import complexity as cx
from .codes import syndrome
from .patterns import pattern_table

TERMINATIONS = ("trivial", "threshold", "c_max", "q_max", "exhausted")

ALREADY_CODEWORD = "already-codeword"
COMPLETED = "completed"
NO_COMPLETION = "none"

LOG2 = math.log(2.0)


class SyndromeLookup:
    """Map a syndrome value to the smallest index j with h_j equal to it, else -1."""

    DIRECT_LIMIT = 24

    def __init__(self, code):
        self.r = code.r
        cols = code.columns
        if code.r <= self.DIRECT_LIMIT:
            table = [-1] * (1 << code.r)
            for j in range(code.n - 1, -1, -1):
                table[cols[j]] = j
            table[0] = -1
            self.table = table
            self.get = table.__getitem__
        else:
            table = {}
            for j in range(code.n - 1, -1, -1):
                if cols[j]:
                    table[cols[j]] = j
            self.table = table
            self.get = lambda s: table.get(s, -1)

    @property
    def direct(self):
        return isinstance(self.table, list)

    def __call__(self, s):
        return self.get(s)


def build_syndrome_lookup(code):
    return SyndromeLookup(code)


@dataclass(frozen=True, eq=False)
class Candidate:
    flips: frozenset
    codeword: np.ndarray
    analog_weight: float


def make_candidate(w, flips, abs_llr, code):
    """Form w with ``flips`` inverted; refuses anything outside the code."""
    c = w.copy()
    idx = np.fromiter(flips, dtype=np.intp, count=len(flips))
    c[idx] ^= 1
    if syndrome(c, code) != 0:
        raise AssertionError(f"candidate with flips {sorted(flips)} is not a codeword")
    return Candidate(frozenset(flips), c, float(np.sum(abs_llr[idx])))


@dataclass
class DecodeResult:
    best: np.ndarray | None
    candidates: list = field(default_factory=list)
    queries: int = 0
    ops: cx.OpTally = field(default_factory=cx.OpTally)
    termination: str = "trivial"

    @property
    def abandoned(self):
        return self.best is None


def partial_syndrome(s, positions, code):
    for j in positions:
        s ^= code.columns[j]
    return s


def complete_pep(s_tilde, lookup, pep_positions, strict_eq3=False):
    """Complete a PEP from its partial syndrome.

    Returns ``(outcome, flips)``. A zero partial syndrome means the PEP is
    itself a valid correction (disabled by ``strict_eq3``). A lookup hit on a
    position already in the PEP cancels that flip.
    """
    if s_tilde == 0:
        if strict_eq3:
            return NO_COMPLETION, None
        return ALREADY_CODEWORD, frozenset(pep_positions)
    j = lookup(s_tilde)
    if j < 0:
        return NO_COMPLETION, None
    return COMPLETED, frozenset(pep_positions) ^ {j}


def analog_weight(flips, abs_llr):
    return float(sum(abs_llr[j] for j in flips))


def _trivial(inst, code, tally):
    s = syndrome(inst.w, code)
    tally.syndrome_xors += int(np.count_nonzero(inst.w))
    if s == 0:
        return s, DecodeResult(best=inst.w.copy(), queries=0, ops=tally, termination="trivial")
    return s, None


def _finish(candidates, q, tally, c_max, exhausted):
    if len(candidates) >= c_max:
        termination = "c_max"
    else:
        termination = "exhausted" if exhausted else "q_max"
    if not candidates:
        return DecodeResult(best=None, candidates=[], queries=q, ops=tally, termination=termination)
    cx.charge_selection(tally, len(candidates))
    best = min(candidates, key=lambda c: c.analog_weight)
    return DecodeResult(best=best.codeword, candidates=candidates, queries=q, ops=tally, termination=termination)


def _trace_record(q, ranks, positions, outcome, flips=None, eps=None):
    return {
        "query": q,
        "ranks": [r + 1 for r in ranks],
        "positions": sorted(positions),
        "outcome": outcome,
        "flips": None if flips is None else sorted(flips),
        "epsilon": eps,
    }


def decode_ordept_lt(inst, code, lookup, patterns=None, q_max=1 << 15, c_max=8,
                     epsilon_t=0.0, strict_eq3=False, trace=None):
    """ORDEPT with likelihood-based thresholding.

    Stops at the first new candidate whose analog weight is strictly below
    ``epsilon_t``; otherwise collects up to ``c_max`` distinct candidates within
    ``q_max`` queries and returns the one of least analog weight.
    """
    if c_max < 1 or q_max < 1:
        raise ValueError("c_max and q_max must be >= 1")
    if epsilon_t < 0:
        raise ValueError("epsilon_t must be nonnegative")
    tally = cx.OpTally()
    s, done = _trivial(inst, code, tally)
    if done:
        return done
    if patterns is None:
        patterns = pattern_table(code.n, q_max)
    pi = inst.pi.tolist()
    abs_l = inst.abs_llr.tolist()
    cols = code.columns
    ranked = [cols[p] for p in pi]
    get = lookup.get
    seen = set()
    candidates = []
    q = 0
    xors = 0
    exhausted = True
    for ranks in patterns:
        if len(candidates) >= c_max or q >= q_max:
            exhausted = False
            break
        q += 1
        st = s
        for r in ranks:
            st ^= ranked[r]
        xors += len(ranks)
        if st and get(st) < 0:
            if trace is not None:
                trace.append(_trace_record(q, ranks, [pi[r] for r in ranks], NO_COMPLETION))
            continue
        positions = [pi[r] for r in ranks]
        outcome, flips = complete_pep(st, lookup, positions, strict_eq3)
        if flips is None or flips in seen:
            if trace is not None:
                trace.append(_trace_record(q, ranks, positions, outcome if flips is None else "duplicate", flips))
            continue
        seen.add(flips)
        eps = sum(abs_l[j] for j in flips)
        cx.charge_lt_candidate(tally, len(flips))
        cand = make_candidate(inst.w, flips, inst.abs_llr, code)
        candidates.append(cand)
        if trace is not None:
            trace.append(_trace_record(q, ranks, positions, outcome, flips, eps))
        if eps < epsilon_t:
            tally.queries = q
            tally.syndrome_xors += xors
            return DecodeResult(best=cand.codeword, candidates=candidates, queries=q, ops=tally,
                                termination="threshold")
    else:
        exhausted = q < q_max and len(candidates) < c_max
    tally.queries = q
    tally.syndrome_xors += xors
    return _finish(candidates, q, tally, c_max, exhausted)


# -- SOGRAND termination -----------------------------------------------------

def hard_decision_logprob(abs_llr):
    """log p(w | l): sum_j -log(1 + exp(-|l_j|))."""
    return float(-np.sum(np.logaddexp(0.0, -np.asarray(abs_llr, dtype=np.float64))))


def sogrand_pattern_logprob(flips, llr, base=None):
    """Log a-posteriori probability of the word w ^ e, e the indicator of ``flips``.

    Each flipped position swaps 1/(1+e^-|l|) for 1/(1+e^|l|), a factor of
    e^-|l| relative to the hard decision.
    """
    abs_llr = np.abs(np.asarray(llr, dtype=np.float64))
    if base is None:
        base = hard_decision_logprob(abs_llr)
    return base - analog_weight(flips, abs_llr)


@dataclass
class SograndState:
    """Running probabilities for the not-in-list estimate.

    Sums are held relative to the hard-decision probability ``base_log``:
    every guessed word has log-probability at most ``base_log``, so the scaled
    terms lie in (0, 1] and the running sums cannot overflow.
    """

    n: int
    k: int
    theta: float
    base_log: float
    noise_scaled: float = 0.0
    list_scaled: float = 0.0
    list_log_probs: list = field(default_factory=list)

    def add_guess(self, log_p):
        self.noise_scaled += math.exp(log_p - self.base_log)

    def add_candidate(self, log_p):
        self.list_log_probs.append(log_p)
        self.list_scaled += math.exp(log_p - self.base_log)

    @property
    def log_p_noise(self):
        return self.base_log + math.log(self.noise_scaled) if self.noise_scaled > 0 else -math.inf

    @property
    def log_p_list(self):
        return self.base_log + math.log(self.list_scaled) if self.list_scaled > 0 else -math.inf


def sogrand_not_in_list_prob(state):
    """Estimated probability that the transmitted codeword is not yet listed.

    With P the list mass and T = p_noise + P the total explored mass,
    returns (1 - T) 2^(k-n) / (P + (1 - T) 2^(k-n)), clamped to [0, 1].
    Overlapping guesses can push T past 1; the unexplored mass 1 - T is then
    taken as zero.
    """
    if not state.list_log_probs:
        raise ValueError("not-in-list probability needs at least one candidate")
    log_list = state.log_p_list
    log_total = state.base_log + math.log(state.noise_scaled + state.list_scaled)
    if log_total >= 0.0:
        return 0.0
    log_num = math.log(-math.expm1(log_total)) + (state.k - state.n) * LOG2
    log_den = np.logaddexp(log_list, log_num)
    return min(max(math.exp(log_num - log_den), 0.0), 1.0)


def decode_ordept_sogrand(inst, code, lookup, patterns=None, q_max=1 << 15, c_max=8,
                          theta=1e-3, strict_eq3=False, trace=None):
    """ORDEPT stopped by the SOGRAND not-in-list probability falling to ``theta``."""
    if not 0.0 < theta < 1.0:
        raise ValueError("theta must lie in (0, 1)")
    if c_max < 1 or q_max < 1:
        raise ValueError("c_max and q_max must be >= 1")
    tally = cx.OpTally()
    s, done = _trivial(inst, code, tally)
    if done:
        return done
    if patterns is None:
        patterns = pattern_table(code.n, q_max)
    base = hard_decision_logprob(inst.abs_llr)
    cx.charge_sogrand_base(tally, code.n)
    state = SograndState(n=code.n, k=code.k, theta=theta, base_log=base)
    # The all-zero pattern was the first guess (w itself failed the check).
    state.add_guess(base)
    pi = inst.pi.tolist()
    abs_l = inst.abs_llr.tolist()
    abs_ranked = [abs_l[p] for p in pi]
    cols = code.columns
    ranked = [cols[p] for p in pi]
    get = lookup.get
    seen = set()
    candidates = []
    q = 0
    xors = 0
    exhausted = True
    for ranks in patterns:
        if len(candidates) >= c_max or q >= q_max:
            exhausted = False
            break
        q += 1
        st = s
        lp = base
        for r in ranks:
            st ^= ranked[r]
            lp -= abs_ranked[r]
        xors += len(ranks)
        state.add_guess(lp)
        cx.charge_sogrand_query(tally, len(ranks))
        if st and get(st) < 0:
            if trace is not None:
                trace.append(_trace_record(q, ranks, [pi[r] for r in ranks], NO_COMPLETION))
            continue
        positions = [pi[r] for r in ranks]
        outcome, flips = complete_pep(st, lookup, positions, strict_eq3)
        if flips is None or flips in seen:
            if trace is not None:
                trace.append(_trace_record(q, ranks, positions, outcome if flips is None else "duplicate", flips))
            continue
        seen.add(flips)
        cand = make_candidate(inst.w, flips, inst.abs_llr, code)
        candidates.append(cand)
        # One op adjusts the PEP probability for the completing position, one adds it to the list mass.
        cx.charge_sogrand_candidate(tally)
        state.add_candidate(base - cand.analog_weight)
        p_out = sogrand_not_in_list_prob(state)
        if trace is not None:
            rec = _trace_record(q, ranks, positions, outcome, flips, cand.analog_weight)
            rec["p_not_in_list"] = p_out
            trace.append(rec)
        if p_out <= theta:
            tally.queries = q
            tally.syndrome_xors += xors
            res = _finish(candidates, q, tally, c_max, False)
            res.termination = "threshold"
            return res
    else:
        exhausted = q < q_max and len(candidates) < c_max
    tally.queries = q
    tally.syndrome_xors += xors
    return _finish(candidates, q, tally, c_max, exhausted)


# -- ORBGRAND ----------------------------------------------------------------

def decode_orbgrand(inst, code, patterns=None, q_max=1 << 15, c_max=1, trace=None):
    """ORBGRAND (``c_max=1``) or list-ORBGRAND (``c_max > 1``) on whole patterns."""
    if c_max < 1 or q_max < 1:
        raise ValueError("c_max and q_max must be >= 1")
    tally = cx.OpTally()
    s, done = _trivial(inst, code, tally)
    if done:
        return done
    if patterns is None:
        patterns = pattern_table(code.n, q_max)
    pi = inst.pi.tolist()
    cols = code.columns
    ranked = [cols[p] for p in pi]
    candidates = []
    q = 0
    xors = 0
    exhausted = True
    for ranks in patterns:
        if len(candidates) >= c_max or q >= q_max:
            exhausted = False
            break
        q += 1
        st = s
        for r in ranks:
            st ^= ranked[r]
        xors += len(ranks)
        if st:
            if trace is not None:
                trace.append(_trace_record(q, ranks, [pi[r] for r in ranks], NO_COMPLETION))
            continue
        flips = frozenset(pi[r] for r in ranks)
        cand = make_candidate(inst.w, flips, inst.abs_llr, code)
        candidates.append(cand)
        if c_max > 1:
            cx.charge_list_candidate(tally, len(flips))
        if trace is not None:
            trace.append(_trace_record(q, ranks, flips, "codeword", flips, cand.analog_weight))
    else:
        exhausted = q < q_max and len(candidates) < c_max
    tally.queries = q
    tally.syndrome_xors += xors
    return _finish(candidates, q, tally, c_max, exhausted)
