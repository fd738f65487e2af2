"""BPSK over real AWGN: modulation, noise, LLRs, hard decisions, reliability order."""

import math
from dataclasses import dataclass

import numpy as np

from .codes import encode


def ebno_to_sigma(ebno_db, rate):
    """Noise std for unit-energy BPSK at the given Eb/N0 (dB) and code rate."""
    if not 0 < rate <= 1:
        raise ValueError(f"rate must lie in (0, 1], got {rate}")
    return math.sqrt(1.0 / (2.0 * rate * 10.0 ** (ebno_db / 10.0)))


@dataclass(frozen=True)
class ChannelParams:
    ebno_db: float
    rate: float
    seed: int = 0

    @property
    def sigma(self):
        return ebno_to_sigma(self.ebno_db, self.rate)


@dataclass(frozen=True, eq=False)
class ReceivedInstance:
    """One channel use as seen by a decoder, plus simulation bookkeeping."""

    y: np.ndarray
    llr: np.ndarray
    abs_llr: np.ndarray
    w: np.ndarray
    pi: np.ndarray
    c_true: np.ndarray | None = None

    @property
    def n(self):
        return self.y.shape[0]

    @property
    def z_true(self):
        if self.c_true is None:
            return None
        return self.c_true ^ self.w


def modulate(c):
    return 1.0 - 2.0 * np.asarray(c, dtype=np.float64)


def transmit(x, sigma, rng):
    return np.asarray(x, dtype=np.float64) + rng.normal(0.0, sigma, size=np.shape(x))


def compute_llr(y, sigma):
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    llr = 2.0 * np.asarray(y, dtype=np.float64) / sigma**2
    return llr, np.abs(llr)


def hard_decision(y):
    # y == 0 maps to bit 0.
    return (np.asarray(y) < 0).astype(np.uint8)


def sort_reliability(abs_llr):
    """Positions sorted by ascending |LLR|; ties keep the lower index first."""
    return np.argsort(abs_llr, kind="stable")


def receive(y, sigma, c_true=None):
    """Wrap raw channel output into a ReceivedInstance."""
    y = np.asarray(y, dtype=np.float64)
    llr, abs_llr = compute_llr(y, sigma)
    return ReceivedInstance(
        y=y,
        llr=llr,
        abs_llr=abs_llr,
        w=hard_decision(y),
        pi=sort_reliability(abs_llr),
        c_true=None if c_true is None else np.asarray(c_true, dtype=np.uint8),
    )


def trial_rng(seed, point_index, trial_index):
    """Independent generator for one trial, fixed by (seed, point, trial)."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(point_index), int(trial_index)))
    return np.random.default_rng(ss)


def simulate_instance(code, sigma, rng, all_zero=False):
    """Draw an information word, encode, modulate and pass it through AWGN."""
    if all_zero:
        c = np.zeros(code.n, dtype=np.uint8)
    else:
        u = rng.integers(0, 2, size=code.k, dtype=np.uint8)
        c = encode(u, code)
    y = transmit(modulate(c), sigma, rng)
    return receive(y, sigma, c_true=c)


def q_function(x):
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def uncoded_ber(ebno_db, n_bits, seed=0, point_index=0, chunk=1 << 16):
    """Empirical hard-decision BER of uncoded BPSK next to its Q(1/sigma) value.

    Returns ``(errors, n_bits, theory)``.
    """
    sigma = ebno_to_sigma(ebno_db, 1.0)
    errors, done, idx = 0, 0, 0
    while done < n_bits:
        m = min(chunk, n_bits - done)
        rng = trial_rng(seed, point_index, idx)
        bits = rng.integers(0, 2, size=m, dtype=np.uint8)
        y = transmit(modulate(bits), sigma, rng)
        errors += int(np.count_nonzero(hard_decision(y) != bits))
        done += m
        idx += 1
    return errors, n_bits, q_function(1.0 / sigma)


def format_instance(inst, ebno_db, trial):
    """One tab-separated dump record: ebno, trial, y, llr, w, pi."""
    return "\t".join([
        repr(float(ebno_db)),
        str(trial),
        " ".join(repr(float(v)) for v in inst.y),
        " ".join(repr(float(v)) for v in inst.llr),
        "".join(str(int(b)) for b in inst.w),
        " ".join(str(int(p)) for p in inst.pi),
    ])


def parse_instance(line):
    ebno, trial, y, llr, w, pi = line.rstrip("\n").split("\t")
    return {
        "ebno_db": float(ebno),
        "trial": int(trial),
        "y": np.array([float(v) for v in y.split()]),
        "llr": np.array([float(v) for v in llr.split()]),
        "w": np.array([int(ch) for ch in w], dtype=np.uint8),
        "pi": np.array([int(v) for v in pi.split()]),
    }
