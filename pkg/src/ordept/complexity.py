"""Query and real-arithmetic accounting for the pattern-testing decoders.

Conventions:

* SOGRAND termination pays ``n`` once per decoded word for the probability
  of the all-zero pattern, ``w + 1`` per query of Hamming weight ``w``
  (probability of the pattern plus its accumulation), and 2 per new candidate.
* Likelihood thresholding pays only per new candidate: one addition per
  flipped position of the completed pattern plus one threshold comparison.
* List decoders that finish without an early stop pay ``C - 1`` comparisons to
  select the minimum analog weight among ``C`` candidates.
* GF(2) syndrome column XORs are tallied apart and never enter ``real_ops``.
"""

from dataclasses import dataclass, fields


class DoubleChargeError(RuntimeError):
    pass


@dataclass
class OpTally:
    queries: int = 0
    base_ops: int = 0
    query_ops: int = 0
    candidate_ops: int = 0
    selection_ops: int = 0
    syndrome_xors: int = 0
    base_charged: bool = False

    @property
    def real_ops(self):
        return self.base_ops + self.query_ops + self.candidate_ops + self.selection_ops

    def __add__(self, other):
        out = OpTally()
        for f in fields(self):
            if f.name != "base_charged":
                setattr(out, f.name, getattr(self, f.name) + getattr(other, f.name))
        return out

    def as_dict(self):
        return {
            "queries": self.queries,
            "real_ops": self.real_ops,
            "base_ops": self.base_ops,
            "query_ops": self.query_ops,
            "candidate_ops": self.candidate_ops,
            "selection_ops": self.selection_ops,
            "syndrome_xors": self.syndrome_xors,
        }


def charge_sogrand_base(tally, n):
    if tally.base_charged:
        raise DoubleChargeError("all-zero pattern probability already charged for this word")
    tally.base_charged = True
    tally.base_ops += n
    return tally


def charge_sogrand_query(tally, weight):
    if weight < 0:
        raise ValueError("pattern weight must be nonnegative")
    tally.query_ops += weight + 1
    tally.queries += 1
    return tally


def charge_sogrand_candidate(tally):
    tally.candidate_ops += 2
    return tally


def charge_lt_candidate(tally, flip_count):
    if flip_count < 1:
        raise ValueError("a completed pattern flips at least one position")
    tally.candidate_ops += flip_count + 1
    return tally


def charge_list_candidate(tally, flip_count):
    """Analog weight of a list-ORBGRAND hit: one addition per flipped position."""
    tally.candidate_ops += flip_count
    return tally


def charge_selection(tally, n_candidates):
    tally.selection_ops += max(n_candidates - 1, 0)
    return tally
