"""Binary linear block codes: construction, encoding, syndromes, file format.

Syndromes are packed into Python ints with parity-check row ``i`` at bit
``i``. Column word ``h_j`` uses the same packing, so ``syndrome(w)`` is the
XOR of the column words at the ones of ``w``.
"""

import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

from . import gf2


class CodeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CodeSpec:
    """An (n, k) binary linear code described by its parity-check matrix."""

    name: str
    n: int
    k: int
    H: np.ndarray
    G: np.ndarray | None = None
    columns: tuple = field(init=False, repr=False)
    rows: tuple = field(init=False, repr=False)
    _column_array: np.ndarray | None = field(init=False, repr=False)

    def __post_init__(self):
        H = np.ascontiguousarray(self.H, dtype=np.uint8)
        H.setflags(write=False)
        object.__setattr__(self, "H", H)
        if self.G is not None:
            G = np.ascontiguousarray(self.G, dtype=np.uint8)
            G.setflags(write=False)
            object.__setattr__(self, "G", G)
        if H.shape != (self.n - self.k, self.n):
            raise CodeError(f"H has shape {H.shape}, expected {(self.n - self.k, self.n)}")
        cols = tuple(gf2.pack_bits(H[:, j]) for j in range(self.n))
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "rows", tuple(gf2.pack_bits(r) for r in H))
        arr = np.array(cols, dtype=np.uint64) if self.r <= 63 else None
        object.__setattr__(self, "_column_array", arr)

    @property
    def r(self):
        """Number of parity checks, n - k."""
        return self.n - self.k

    @property
    def rate(self):
        return self.k / self.n

    def validate(self):
        """Check rank(H) = n - k and G H^T = 0; raise CodeError otherwise."""
        if gf2.rank(self.H) != self.r:
            raise CodeError(f"{self.name}: rank(H) != n - k = {self.r}")
        if self.G is not None:
            if self.G.shape != (self.k, self.n):
                raise CodeError(f"{self.name}: G has shape {self.G.shape}")
            if gf2.matmul(self.G, self.H.T).any():
                raise CodeError(f"{self.name}: G H^T != 0")
            if gf2.rank(self.G) != self.k:
                raise CodeError(f"{self.name}: G is rank deficient")
        return self


def from_parity_check(H, name="custom", G=None):
    """Build a CodeSpec from any H, reducing redundant rows with a warning.

    When ``G`` is omitted a systematic generator is derived from the null
    space of ``H``.
    """
    H = np.asarray(H, dtype=np.uint8) & 1
    n = H.shape[1]
    rk = gf2.rank(H)
    if rk < H.shape[0]:
        warnings.warn(
            f"{name}: parity-check matrix has {H.shape[0]} rows but rank {rk}; "
            f"reducing to n-k = {rk}",
            stacklevel=2,
        )
        H = gf2.row_basis(H)
    if G is None:
        G = gf2.nullspace(H)
    return CodeSpec(name=name, n=n, k=n - rk, H=H, G=G).validate()


# -- BCH ---------------------------------------------------------------------

# Primitive polynomials for GF(2^m), bit i holds the coefficient of x^i.
PRIMITIVE_POLYNOMIALS = {
    3: 0b1011,  # x^3 + x + 1
    4: 0b10011,  # x^4 + x + 1
    5: 0b100101,  # x^5 + x^2 + 1
    6: 0b1000011,  # x^6 + x + 1
    7: 0b10001001,  # x^7 + x^3 + 1
    8: 0b100011101,  # x^8 + x^4 + x^3 + x^2 + 1
    9: 0b1000010001,  # x^9 + x^4 + 1
    10: 0b10000001001,  # x^10 + x^3 + 1
}


def gf_tables(m):
    """Antilog/log tables of GF(2^m) built from the shipped primitive polynomial."""
    if m not in PRIMITIVE_POLYNOMIALS:
        raise CodeError(f"no primitive polynomial for m={m} (supported: 3..10)")
    poly = PRIMITIVE_POLYNOMIALS[m]
    size = (1 << m) - 1
    exp = [0] * (2 * size)
    log = [0] * (size + 1)
    x = 1
    for i in range(size):
        exp[i] = x
        log[x] = i
        x <<= 1
        if x >> m:
            x ^= poly
    for i in range(size, 2 * size):
        exp[i] = exp[i - size]
    return exp, log


def cyclotomic_coset(i, m):
    size = (1 << m) - 1
    coset, j = [], i % size
    while j not in coset:
        coset.append(j)
        j = (2 * j) % size
    return coset


def minimal_polynomial(i, m):
    """Minimal polynomial of alpha^i over GF(2), as an int bit vector."""
    exp, log = gf_tables(m)
    size = (1 << m) - 1
    # Coefficients in GF(2^m), low degree first; start with the constant 1.
    coeffs = [1]
    for j in cyclotomic_coset(i, m):
        root = exp[j % size]
        nxt = [0] * (len(coeffs) + 1)
        for d, c in enumerate(coeffs):
            nxt[d + 1] ^= c
            if c:
                nxt[d] ^= exp[log[c] + log[root]]
        coeffs = nxt
    if any(c not in (0, 1) for c in coeffs):
        raise AssertionError("minimal polynomial has non-binary coefficients")
    return sum(c << d for d, c in enumerate(coeffs))


def poly_mul(a, b):
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def poly_mod(a, b):
    db = b.bit_length() - 1
    while a and a.bit_length() - 1 >= db:
        a ^= b << (a.bit_length() - 1 - db)
    return a


def bch_generator_polynomial(m, t):
    """lcm of the minimal polynomials of alpha, alpha^3, ..., alpha^(2t-1)."""
    size = (1 << m) - 1
    seen, g = set(), 1
    for i in range(1, 2 * t, 2):
        coset = frozenset(cyclotomic_coset(i, m))
        if coset in seen:
            continue
        seen.add(coset)
        g = poly_mul(g, minimal_polynomial(i, m))
    if g.bit_length() - 1 >= size:
        raise CodeError(f"BCH m={m}, t={t} has no information bits")
    return g


def build_bch_code(m, t, extend=False):
    """Narrow-sense primitive binary BCH code, optionally with overall parity.

    The systematic generator places the n-k parity bits first, then the
    message bits. Extension appends an even-parity bit as the last position
    and adds an all-ones row to H.
    """
    if not 3 <= m <= 10:
        raise CodeError(f"unsupported field degree m={m}")
    if t < 1:
        raise CodeError("t must be >= 1")
    n = (1 << m) - 1
    g = bch_generator_polynomial(m, t)
    r = g.bit_length() - 1
    k = n - r
    if k <= 0:
        raise CodeError(f"BCH m={m}, t={t} has k={k}")
    G = np.zeros((k, n), dtype=np.uint8)
    for i in range(k):
        rem = poly_mod(1 << (r + i), g)
        G[i, :r] = gf2.unpack_bits(rem, r)
        G[i, r + i] = 1
    H = np.zeros((r, n), dtype=np.uint8)
    H[:, :r] = np.eye(r, dtype=np.uint8)
    H[:, r:] = G[:, :r].T
    name = f"bch-{n}-{k}"
    if extend:
        G = np.hstack([G, (G.sum(axis=1) % 2).astype(np.uint8)[:, None]])
        H = np.vstack([np.hstack([H, np.zeros((r, 1), dtype=np.uint8)]), np.ones((1, n + 1), dtype=np.uint8)])
        n += 1
        name = f"bch-{n}-{k}"
    return CodeSpec(name=name, n=n, k=k, H=H, G=G).validate()


# -- Polar -------------------------------------------------------------------

@lru_cache(maxsize=None)
def polar_reliability_sequence():
    """The 1024-entry 5G NR polar sequence, least reliable index first."""
    text = resources.files("ordept").joinpath("data/polar_sequence_5g.txt").read_text()
    seq = [int(tok) for line in text.splitlines() if not line.startswith("#") for tok in line.split()]
    return tuple(seq)


def polar_transform(n):
    """Kernel [[1,0],[1,1]] raised to the log2(n)-th Kronecker power."""
    F = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    G = np.ones((1, 1), dtype=np.uint8)
    while G.shape[0] < n:
        G = np.kron(G, F).astype(np.uint8)
    return G


def build_polar_code(n, k):
    """Polar code whose information set is the k most reliable 5G indices.

    Since the polar transform is its own inverse over GF(2), a word c is a
    codeword iff (c @ G_N)_i = 0 for every frozen i, so H is the transpose of
    the frozen columns of G_N.
    """
    if n < 2 or n & (n - 1):
        raise CodeError(f"polar length {n} is not a power of two")
    if n > 1024:
        raise CodeError("polar lengths above 1024 are not covered by the shipped sequence")
    if not 0 < k < n:
        raise CodeError(f"polar dimension must satisfy 0 < k < n, got k={k}")
    seq = [i for i in polar_reliability_sequence() if i < n]
    frozen = sorted(seq[: n - k])
    GN = polar_transform(n)
    H = GN[:, frozen].T.copy()
    code = from_parity_check(H, name=f"polar-{n}-{k}")
    if code.k != k:
        raise AssertionError("polar parity-check matrix lost rank")
    return code


# -- Hamming -----------------------------------------------------------------

def build_hamming_code(m=3):
    """Hamming code with column j equal to the binary expansion of j + 1."""
    n = (1 << m) - 1
    H = np.array([[((j + 1) >> i) & 1 for j in range(n)] for i in range(m)], dtype=np.uint8)
    return from_parity_check(H, name=f"hamming-{n}-{n - m}")


BUILTIN_CODES = {
    "hamming-7-4": lambda: build_hamming_code(3),
    "bch-31-21": lambda: build_bch_code(5, 2),
    "bch-32-21": lambda: build_bch_code(5, 2, extend=True),
    "bch-256-239": lambda: build_bch_code(8, 2, extend=True),
    "polar-8-4": lambda: build_polar_code(8, 4),
    "polar-128-116": lambda: build_polar_code(128, 116),
}


@lru_cache(maxsize=None)
def _builtin(name):
    return BUILTIN_CODES[name]()


def resolve_code(name_or_path):
    """Look up a built-in code by name, otherwise load it from a file."""
    if name_or_path in BUILTIN_CODES:
        return _builtin(name_or_path)
    path = Path(name_or_path)
    if not path.exists():
        raise CodeError(f"unknown code {name_or_path!r}; built-ins: {', '.join(BUILTIN_CODES)}")
    return load_code(path)


# -- Operations --------------------------------------------------------------

def encode(u, code):
    if code.G is None:
        raise CodeError(f"{code.name} has no generator matrix")
    u = np.asarray(u, dtype=np.uint8)
    if u.shape != (code.k,):
        raise CodeError(f"expected {code.k} information bits, got {u.shape}")
    return gf2.matmul(u, code.G)


def syndrome(w, code):
    """w H^T packed as an int (row i of H at bit i)."""
    w = np.asarray(w)
    if w.shape != (code.n,):
        raise CodeError(f"word length {w.shape} does not match n={code.n}")
    ones = np.flatnonzero(w)
    if code._column_array is not None:
        if ones.size == 0:
            return 0
        return int(np.bitwise_xor.reduce(code._column_array[ones]))
    s = 0
    cols = code.columns
    for j in ones:
        s ^= cols[j]
    return s


def is_codeword(w, code):
    return syndrome(w, code) == 0


def syndrome_bits(s, code):
    """Unpack an int syndrome into its n-k bits, row order."""
    return gf2.unpack_bits(s, code.r)


# -- Text file format --------------------------------------------------------

def save_code(code, path):
    """Write ``n k``, then the n-k rows of H, then optionally ``G`` and k rows."""
    lines = [f"{code.n} {code.k}"]
    lines += ["".join(map(str, row)) for row in code.H]
    if code.G is not None:
        lines.append("G")
        lines += ["".join(map(str, row)) for row in code.G]
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_rows(lines, width, what):
    rows = []
    for ln in lines:
        if len(ln) != width or set(ln) - {"0", "1"}:
            raise CodeError(f"malformed {what} row {ln!r}: expected {width} characters in {{0,1}}")
        rows.append([int(ch) for ch in ln])
    return np.array(rows, dtype=np.uint8).reshape(len(rows), width)


def load_code(path):
    path = Path(path)
    lines = [ln.strip() for ln in path.read_text().splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise CodeError(f"{path}: empty code file")
    try:
        n, k = (int(v) for v in lines[0].split())
    except ValueError:
        raise CodeError(f"{path}: first line must be 'n k'") from None
    if not 0 < k < n:
        raise CodeError(f"{path}: invalid dimensions n={n}, k={k}")
    body = lines[1:]
    g_lines = None
    if "G" in body:
        idx = body.index("G")
        body, g_lines = body[:idx], body[idx + 1:]
    if len(body) != n - k:
        raise CodeError(f"{path}: expected {n - k} H rows, found {len(body)}")
    H = _parse_rows(body, n, "H")
    G = None
    if g_lines is not None:
        if len(g_lines) != k:
            raise CodeError(f"{path}: expected {k} G rows, found {len(g_lines)}")
        G = _parse_rows(g_lines, n, "G")
    if gf2.rank(H) < n - k:
        # Redundant rows leave more information bits; the stored G no longer fits.
        G = None
    return from_parity_check(H, name=path.stem, G=G)
