"""Monte Carlo BLER/complexity sweeps, parameter searches and the ML oracle.

Every trial draws its randomness from its own substream keyed by
(seed, Eb/N0 index, trial index). Trials are evaluated in batches on any
number of workers and merged in trial order, and a point stops at the exact
trial index where the error target is reached. The output therefore does not
depend on the worker count.
"""

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.stats import beta

from . import channel
from .codes import resolve_code, syndrome
from .decoders import build_syndrome_lookup, decode_orbgrand, decode_ordept_lt, decode_ordept_sogrand
from .patterns import pattern_table

DECODERS = ("ordept-lt", "ordept-sogrand", "orbgrand", "orbgrand-list")

CSV_FIELDS = [
    "ebno_db", "trials", "block_errors", "bler", "ci95_lo", "ci95_hi",
    "avg_queries", "avg_real_ops", "avg_syndrome_xors",
    "decoder", "code", "qmax", "cmax", "threshold", "seed",
]


@dataclass
class SimConfig:
    code: str = "bch-32-21"
    decoder: str = "ordept-lt"
    qmax: int = 1 << 15
    cmax: int = 8
    threshold: float = 0.0
    theta: float = 1e-3
    ebno_db: list = field(default_factory=lambda: [4.0, 5.0])
    min_block_errors: int = 100
    max_trials: int = 10**7
    seed: int = 0
    workers: int = 1
    batch_size: int = 200
    strict_eq3: bool = False
    out: str = "results"

    def validate(self):
        if self.decoder not in DECODERS:
            raise ValueError(f"unknown decoder {self.decoder!r}; choose from {', '.join(DECODERS)}")
        if self.min_block_errors < 1:
            raise ValueError("min_block_errors must be >= 1")
        if self.max_trials < self.min_block_errors:
            raise ValueError("max_trials must be >= min_block_errors")
        if self.qmax < 1 or self.cmax < 1:
            raise ValueError("qmax and cmax must be >= 1")
        if self.workers < 1 or self.batch_size < 1:
            raise ValueError("workers and batch_size must be >= 1")
        return self

    @property
    def threshold_value(self):
        if self.decoder == "ordept-lt":
            return self.threshold
        if self.decoder == "ordept-sogrand":
            return self.theta
        return None


_CONFIG_TYPES = {f.name: f.type for f in fields(SimConfig)}


def parse_config_value(key, text):
    if key not in _CONFIG_TYPES:
        raise ValueError(f"unknown config key {key!r}")
    kind = _CONFIG_TYPES[key]
    text = text.strip()
    if key == "ebno_db":
        return [float(v) for v in text.replace(",", " ").split()]
    if kind is bool:
        word = text.lower()
        if word not in ("1", "true", "yes", "on", "0", "false", "no", "off"):
            raise ValueError(f"{key}: expected a boolean, got {text!r}")
        return word in ("1", "true", "yes", "on")
    if kind is int:
        return int(float(text)) if "e" in text.lower() else int(text, 0)
    if kind is float:
        return float(text)
    return text


def load_config(path, base=None):
    """Read ``key = value`` lines (``#`` starts a comment) into a SimConfig."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = parse_config_value(key.replace("-", "_"), val)
    return replace(base or SimConfig(), **values)


# -- Per-trial work -----------------------------------------------------------

@lru_cache(maxsize=8)
def decoder_context(code_name, qmax):
    code = resolve_code(code_name)
    return code, build_syndrome_lookup(code), pattern_table(code.n, qmax)


def decode(cfg, inst, trace=None):
    code, lookup, patterns = decoder_context(cfg.code, cfg.qmax)
    if cfg.decoder == "ordept-lt":
        return decode_ordept_lt(inst, code, lookup, patterns, q_max=cfg.qmax, c_max=cfg.cmax,
                                epsilon_t=cfg.threshold, strict_eq3=cfg.strict_eq3, trace=trace)
    if cfg.decoder == "ordept-sogrand":
        return decode_ordept_sogrand(inst, code, lookup, patterns, q_max=cfg.qmax, c_max=cfg.cmax,
                                     theta=cfg.theta, strict_eq3=cfg.strict_eq3, trace=trace)
    if cfg.decoder == "orbgrand":
        return decode_orbgrand(inst, code, patterns, q_max=cfg.qmax, c_max=1, trace=trace)
    return decode_orbgrand(inst, code, patterns, q_max=cfg.qmax, c_max=cfg.cmax, trace=trace)


def run_trials(cfg, point_index, ebno_db, start, stop, dump=False, trace=False):
    """Decode trials [start, stop) of one point.

    Returns an int64 array with columns (error, queries, real_ops,
    syndrome_xors) and, when requested, per-trial dump and trace lines.
    """
    code = decoder_context(cfg.code, cfg.qmax)[0]
    sigma = channel.ebno_to_sigma(ebno_db, code.rate)
    rows = np.zeros((stop - start, 4), dtype=np.int64)
    dumps, traces = [], []
    for i, t in enumerate(range(start, stop)):
        inst = channel.simulate_instance(code, sigma, channel.trial_rng(cfg.seed, point_index, t))
        records = [] if trace else None
        res = decode(cfg, inst, trace=records)
        err = res.best is None or not np.array_equal(res.best, inst.c_true)
        rows[i] = (err, res.queries, res.ops.real_ops, res.ops.syndrome_xors)
        if dump:
            dumps.append(channel.format_instance(inst, ebno_db, t))
        if trace:
            traces.extend(format_trace(ebno_db, t, rec) for rec in records)
            traces.append(format_trace(ebno_db, t, {"result": res.termination, "queries": res.queries,
                                                    "error": bool(err)}))
    return rows, dumps, traces


def format_trace(ebno_db, trial, record):
    parts = [f"ebno={ebno_db!r}", f"trial={trial}"]
    parts += [f"{k}={v!r}" if isinstance(v, float) else f"{k}={v}" for k, v in record.items()]
    return " ".join(parts)


# -- Aggregation --------------------------------------------------------------

@dataclass
class CurvePoint:
    ebno_db: float
    trials: int
    block_errors: int
    bler: float
    ci95_lo: float
    ci95_hi: float
    avg_queries: float
    avg_real_ops: float
    avg_syndrome_xors: float


def clopper_pearson(errors, trials, level=0.95):
    if trials == 0:
        return 0.0, 1.0
    a = (1.0 - level) / 2.0
    lo = 0.0 if errors == 0 else float(beta.ppf(a, errors, trials - errors + 1))
    hi = 1.0 if errors == trials else float(beta.ppf(1.0 - a, errors + 1, trials - errors))
    return lo, hi


def summarize(ebno_db, rows):
    trials = rows.shape[0]
    errors = int(rows[:, 0].sum())
    lo, hi = clopper_pearson(errors, trials)
    means = rows[:, 1:].sum(axis=0) / trials if trials else np.zeros(3)
    return CurvePoint(
        ebno_db=float(ebno_db), trials=trials, block_errors=errors,
        bler=errors / trials if trials else 0.0, ci95_lo=lo, ci95_hi=hi,
        avg_queries=float(means[0]), avg_real_ops=float(means[1]), avg_syndrome_xors=float(means[2]),
    )


class _Runner:
    """Dispatches trial batches either inline or onto a process pool."""

    def __init__(self, workers):
        self.pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None

    def map(self, jobs):
        if self.pool is None:
            return [run_trials(*job) for job in jobs]
        futures = [self.pool.submit(run_trials, *job) for job in jobs]
        return [f.result() for f in futures]

    def close(self):
        if self.pool is not None:
            self.pool.shutdown()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def run_point(cfg, point_index, ebno_db, runner=None, dump_lines=None, trace_lines=None):
    """Simulate one Eb/N0 point until min_block_errors or max_trials."""
    own = runner is None
    runner = runner or _Runner(cfg.workers)
    chunks, errors, done = [], 0, 0
    try:
        while done < cfg.max_trials and errors < cfg.min_block_errors:
            jobs = []
            start = done
            for _ in range(cfg.workers):
                if start >= cfg.max_trials:
                    break
                stop = min(start + cfg.batch_size, cfg.max_trials)
                jobs.append((cfg, point_index, ebno_db, start, stop, dump_lines is not None, trace_lines is not None))
                start = stop
            for rows, dumps, traces in runner.map(jobs):
                chunk_errors = np.cumsum(rows[:, 0]) + errors
                hit = np.nonzero(chunk_errors >= cfg.min_block_errors)[0]
                keep = rows.shape[0] if hit.size == 0 else int(hit[0]) + 1
                chunks.append(rows[:keep])
                if dump_lines is not None:
                    dump_lines.extend(dumps[:keep])
                if trace_lines is not None:
                    cut = _trace_cut(traces, keep)
                    trace_lines.extend(traces[:cut])
                errors += int(rows[:keep, 0].sum())
                done += keep
                if errors >= cfg.min_block_errors:
                    break
    finally:
        if own:
            runner.close()
    rows = np.concatenate(chunks) if chunks else np.zeros((0, 4), dtype=np.int64)
    return summarize(ebno_db, rows)


def _trace_cut(lines, keep):
    """Number of trace lines covering the first ``keep`` trials of a batch."""
    seen = 0
    for i, line in enumerate(lines):
        if " result=" in line:
            seen += 1
            if seen == keep:
                return i + 1
    return len(lines)


def run_bler_sweep(cfg, dump_path=None, trace_path=None):
    cfg.validate()
    dump_lines = [] if dump_path else None
    trace_lines = [] if trace_path else None
    with _Runner(cfg.workers) as runner:
        points = [run_point(cfg, i, e, runner, dump_lines, trace_lines) for i, e in enumerate(cfg.ebno_db)]
    if dump_path:
        Path(dump_path).write_text("".join(line + "\n" for line in dump_lines))
    if trace_path:
        Path(trace_path).write_text("".join(line + "\n" for line in trace_lines))
    return points


def bler_monotonicity(points):
    """Pairs of adjacent Eb/N0 points where the BLER estimate goes up.

    Each entry is ``(lower_ebno, higher_ebno, kind)``; ``kind`` is ``"flag"``
    when the two confidence intervals overlap (plausibly noise) and
    ``"violation"`` when they do not.
    """
    ordered = sorted(points, key=lambda p: p.ebno_db)
    out = []
    for a, b in zip(ordered, ordered[1:]):
        if b.bler > a.bler:
            kind = "flag" if b.ci95_lo <= a.ci95_hi else "violation"
            out.append((a.ebno_db, b.ebno_db, kind))
    return out


# -- Export -------------------------------------------------------------------

def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def export_results(points, path, cfg=None, figure=True):
    """Write the CSV and, with ``figure``, an SVG of BLER and average ops.

    Returns the list of files written.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    meta = {}
    if cfg is not None:
        meta = {"decoder": cfg.decoder, "code": cfg.code, "qmax": cfg.qmax, "cmax": cfg.cmax,
                "threshold": cfg.threshold_value, "seed": cfg.seed}
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for p in points:
            row = asdict(p) | meta
            writer.writerow([_fmt(row.get(k)) for k in CSV_FIELDS])
    written = [path]
    if figure and points:
        from .plotting import plot_curves

        label = cfg.decoder if cfg is not None else path.stem
        written.append(plot_curves({label: points}, path.with_suffix(".svg"),
                                   title=cfg.code if cfg is not None else None))
    return written


def read_results(path):
    """Parse a results CSV back into (CurvePoint list, metadata of first row)."""
    points, meta = [], {}
    with Path(path).open(newline="") as fh:
        for row in csv.DictReader(fh):
            points.append(CurvePoint(
                ebno_db=float(row["ebno_db"]), trials=int(row["trials"]),
                block_errors=int(row["block_errors"]), bler=float(row["bler"]),
                ci95_lo=float(row["ci95_lo"]), ci95_hi=float(row["ci95_hi"]),
                avg_queries=float(row["avg_queries"]), avg_real_ops=float(row["avg_real_ops"]),
                avg_syndrome_xors=float(row["avg_syndrome_xors"]),
            ))
            if not meta:
                meta = {k: row[k] for k in ("decoder", "code", "qmax", "cmax", "threshold", "seed") if k in row}
    return points, meta


def read_reference(path):
    """Reference BLER curve as {ebno_db: bler} from any CSV with those columns."""
    ref = {}
    with Path(path).open(newline="") as fh:
        for row in csv.DictReader(fh):
            ref[float(row["ebno_db"])] = float(row["bler"])
    if not ref:
        raise ValueError(f"{path}: no reference points")
    return ref


# -- Parameter searches -------------------------------------------------------

@dataclass
class SearchResult:
    value: object
    found: bool
    history: list = field(default_factory=list)


def _beats(points, ref):
    return all(p.bler < ref[p.ebno_db] for p in points)


def optimize_cmax(cfg, ref, c_cap=64):
    """Smallest power-of-two C_max (with epsilon_T = 0) beating ``ref`` everywhere."""
    base = replace(cfg, decoder="ordept-lt", threshold=0.0, ebno_db=sorted(ref)).validate()
    history = []
    c = 1
    with _Runner(base.workers) as runner:
        while c <= c_cap:
            trial_cfg = replace(base, cmax=c)
            points = [run_point(trial_cfg, i, e, runner) for i, e in enumerate(trial_cfg.ebno_db)]
            ok = _beats(points, ref)
            history.append((c, points, ok))
            if ok:
                return SearchResult(c, True, history)
            c *= 2
    return SearchResult(None, False, history)


def optimize_threshold(cfg, c_star, ref, step=0.25, grid_max=32.0):
    """Largest grid epsilon_T per Eb/N0 keeping BLER below the reference there.

    Bisects over grid indices, relying on BLER being nondecreasing in
    epsilon_T at fixed seeds. Returns {ebno_db: SearchResult}.
    """
    base = replace(cfg, decoder="ordept-lt", cmax=c_star, ebno_db=sorted(ref)).validate()
    top = int(round(grid_max / step))
    out = {}
    with _Runner(base.workers) as runner:
        for i, e in enumerate(base.ebno_db):
            history = []

            def ok(idx):
                point = run_point(replace(base, threshold=idx * step), i, e, runner)
                good = point.bler < ref[e]
                history.append((idx * step, point, good))
                return good

            if ok(top):
                out[e] = SearchResult(top * step, True, history)
                continue
            if not ok(0):
                out[e] = SearchResult(None, False, history)
                continue
            lo, hi = 0, top
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if ok(mid):
                    lo = mid
                else:
                    hi = mid
            out[e] = SearchResult(lo * step, True, history)
    return out


# -- ML oracle ----------------------------------------------------------------

ML_MAX_K = 24


@lru_cache(maxsize=4)
def _codebook_bytes(code):
    """All 2^k codewords, sorted lexicographically, as big-endian packed bytes."""
    if code.k > ML_MAX_K:
        raise ValueError(f"exhaustive ML needs k <= {ML_MAX_K}, got k={code.k}")
    if code.G is None:
        raise ValueError("exhaustive ML needs a generator matrix")
    n_bytes = (code.n + 7) // 8
    rows = np.packbits(code.G, axis=1)
    book = np.zeros((1, n_bytes), dtype=np.uint8)
    for g in rows:
        book = np.concatenate([book, book ^ g])
    order = np.lexsort(book.T[::-1])
    return np.ascontiguousarray(book[order])


def ml_oracle_decode(inst, code):
    """Exhaustive minimum-analog-weight codeword; ties go to the lexicographically first."""
    book = _codebook_bytes(code)
    if np.all(inst.abs_llr > 0) and syndrome(inst.w, code) == 0:
        # Every other codeword differs somewhere and so has positive weight.
        return inst.w.copy()
    n_bytes = book.shape[1]
    abs_l = np.zeros(8 * n_bytes)
    abs_l[: code.n] = inst.abs_llr
    bit_table = np.unpackbits(np.arange(256, dtype=np.uint8)[:, None], axis=1).astype(np.float64)
    wb = np.packbits(inst.w)
    metric = np.zeros(book.shape[0])
    for b in range(n_bytes):
        table = bit_table @ abs_l[8 * b: 8 * b + 8]
        metric += table[book[:, b] ^ wb[b]]
    best = book[int(np.argmin(metric))]
    return np.unpackbits(best)[: code.n]


# -- Uncoded sanity mode ------------------------------------------------------

def uncoded_ber_check(ebno_list, n_bits=10**6, seed=0):
    """Rows of (ebno_db, errors, bits, ber, theory, z_score)."""
    out = []
    for i, e in enumerate(ebno_list):
        errors, bits, theory = channel.uncoded_ber(e, n_bits, seed=seed, point_index=i)
        sd = math.sqrt(bits * theory * (1 - theory))
        out.append((e, errors, bits, errors / bits, theory, (errors - bits * theory) / sd))
    return out


def default_workers():
    return max(1, os.cpu_count() or 1)
