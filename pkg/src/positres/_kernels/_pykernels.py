"""Pure-Python fallback for the hot sweep/round-trip kernels.

Same contracts and bit-exact results as the Cython backend, an order of
magnitude slower.  All arithmetic on decoded values is exact integer
arithmetic on (mantissa, power-of-two exponent) pairs, so records and
tallies are independent of evaluation order and worker partitioning.
"""

from __future__ import annotations

BACKEND = "python"

CLS_FINITE = 0
CLS_ZERO = 1
CLS_SUB = 2
CLS_INF = 3
CLS_NAN = 4
CLS_NAR = 5

_VALUED = (CLS_FINITE, CLS_ZERO, CLS_SUB)

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15

TALLY_KEYS = (
    "trials",
    "posit_wins",
    "float_wins",
    "ties",
    "incomparable",
    "float_nan_created",
    "float_inf_created",
    "posit_nar_created",
    "float_zero_golden_skipped",
    "posit_zero_golden_skipped",
    "float_injections",
    "posit_injections",
)


def decode_float_parts(word):
    """(cls, neg, m, e) with value = (-1)**neg * m * 2**e for valued classes."""
    exp = (word >> 23) & 0xFF
    frac = word & 0x7FFFFF
    neg = word >> 31
    if exp == 0xFF:
        return (CLS_NAN if frac else CLS_INF, neg, 0, 0)
    if exp == 0:
        if frac == 0:
            return (CLS_ZERO, neg, 0, 0)
        return (CLS_SUB, neg, frac, -149)
    return (CLS_FINITE, neg, (1 << 23) | frac, exp - 150)


def decode_posit_parts(word):
    """(cls, neg, m, e) for posit(32, 2); exact dyadic magnitude."""
    if word == 0:
        return (CLS_ZERO, 0, 0, 0)
    if word == 0x80000000:
        return (CLS_NAR, 0, 0, 0)
    neg = word >> 31
    body = ((-word) & 0x7FFFFFFF) if neg else (word & 0x7FFFFFFF)
    if body >> 30:
        inv = (~body) & 0x7FFFFFFF
        run = 31 if inv == 0 else 31 - inv.bit_length()
        k = run - 1
    else:
        run = 31 - body.bit_length()
        k = -run
    rem = 31 - run - 1
    if rem < 0:
        rem = 0
    rest = body & ((1 << rem) - 1)
    e_avail = 2 if rem >= 2 else rem
    expf = (rest >> (rem - e_avail)) << (2 - e_avail) if e_avail else 0
    w = rem - e_avail
    m = (1 << w) | (rest & ((1 << w) - 1))
    return (CLS_FINITE, neg, m, 4 * k + expf - w)


def _rne_shift(m, sh):
    q = m >> sh
    rem = m & ((1 << sh) - 1)
    half = 1 << (sh - 1)
    if rem > half or (rem == half and q & 1):
        q += 1
    return q


def encode_float_parts(neg, m, e):
    """Nearest binary32 pattern for (-1)**neg * m * 2**e (m > 0)."""
    s = e + m.bit_length() - 1
    if s >= 128:
        return (neg << 31) | 0x7F800000
    eb = s if s > -126 else -126
    t = e + 23 - eb
    q = m << t if t >= 0 else _rne_shift(m, -t)
    if q >> 24:
        q >>= 1
        eb += 1
    if eb > 127:
        return (neg << 31) | 0x7F800000
    if q < 1 << 23:
        return (neg << 31) | q
    return (neg << 31) | ((eb + 127) << 23) | (q - (1 << 23))


def encode_posit_parts(neg, m, e):
    """Nearest posit(32, 2) pattern for (-1)**neg * m * 2**e (m > 0)."""
    s = e + m.bit_length() - 1
    if s > 120:
        pattern = 0x7FFFFFFF
    elif s < -120:
        pattern = 1
    else:
        k = s >> 2
        exp = s & 3
        if k >= 0:
            reg_len = k + 2
            regime = ((1 << (k + 1)) - 1) << 1
        else:
            reg_len = -k + 1
            regime = 1
        w = m.bit_length() - 1
        frac = m - (1 << w)
        body = ((regime << 2 | exp) << w) | frac
        body_len = reg_len + 2 + w
        if body_len <= 31:
            pattern = body << (31 - body_len)
        else:
            shift = body_len - 31
            pattern = body >> shift
            guard = (body >> (shift - 1)) & 1
            sticky = body & ((1 << (shift - 1)) - 1)
            if guard and (sticky or pattern & 1):
                pattern += 1
            if pattern >= 0x80000000:
                pattern = 0x7FFFFFFF
        if pattern == 0:
            pattern = 1
    return ((-pattern) & 0xFFFFFFFF) if neg else pattern


def roundtrip_failures(words):
    """Count decode->encode mismatches for both formats over ``words``.

    NaN patterns are skipped for float, NaR for posit (no value to
    re-encode); negative zero re-encodes through the sign flag.
    """
    if hasattr(words, "tolist"):
        words = words.tolist()
    float_fails = 0
    posit_fails = 0
    for word in words:
        cls, neg, m, e = decode_float_parts(word)
        if cls == CLS_INF:
            if ((neg << 31) | 0x7F800000) != word:
                float_fails += 1
        elif cls == CLS_ZERO:
            if (neg << 31) != word:
                float_fails += 1
        elif cls != CLS_NAN:
            if encode_float_parts(neg, m, e) != word:
                float_fails += 1
        cls, neg, m, e = decode_posit_parts(word)
        if cls == CLS_ZERO:
            if word != 0:
                posit_fails += 1
        elif cls != CLS_NAR:
            if encode_posit_parts(neg, m, e) != word:
                posit_fails += 1
    return float_fails, posit_fails


def _splitmix(state):
    z = state & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def second_bit(seed, word_index, first_bit):
    """Counter-based uniform draw over [0, 31] \\ {first_bit}."""
    counter = (word_index * 32 + first_bit) & _MASK64
    r = _splitmix((seed + counter * _GAMMA) & _MASK64) % 31
    return r + 1 if r >= first_bit else r


def second_bit_histogram(seed, first_bit, n, start_index=0):
    """Counts of drawn second bits over word indices [start, start+n)."""
    counts = [0] * 32
    for i in range(start_index, start_index + n):
        counts[second_bit(seed, i, first_bit)] += 1
    return counts


def _rel_parts(neg_g, mg, eg, cls_c, neg_c, mc, ec):
    """Relative error |V - V*|/|V| as (A, t): rel = A / (mg << t)."""
    if cls_c == CLS_ZERO or mc == 0:
        return mg, 0
    d = ec - eg
    if d >= 0:
        shifted = mc << d
        a = (mg - shifted if mg >= shifted else shifted - mg) if neg_c == neg_g else mg + shifted
        return a, 0
    shifted = mg << -d
    a = (shifted - mc if shifted >= mc else mc - shifted) if neg_c == neg_g else shifted + mc
    return a, -d


ZERO_GOLDEN_ERROR = 0
ZERO_GOLDEN_SKIP = 1  # no MRED, but injections still tallied
ZERO_GOLDEN_DROP = 2  # word removed from that format entirely


def sweep_chunk(words, base_index, mbu, seed, zero_policy):
    """Fault-inject every bit of every word through both codecs.

    Returns (records, tallies).  Each record is a per-word tuple
    (n_valid_f, num_f, den_f, n_special_f, n_valid_p, num_p, den_p,
    n_special_p); the num/den pairs are the unreduced exact MRED, or
    None when no mean exists for that word/format.  ``tallies`` maps
    TALLY_KEYS to counts, merged associatively by the caller.
    """
    if hasattr(words, "tolist"):
        words = words.tolist()
    records = []
    t = dict.fromkeys(TALLY_KEYS, 0)
    for offset, word in enumerate(words):
        word_index = base_index + offset
        fcls, fneg, fm, fe = decode_float_parts(word)
        pcls, pneg, pm, pe = decode_posit_parts(word)
        f_zero = fcls == CLS_ZERO
        p_zero = pcls == CLS_ZERO
        if (f_zero or p_zero) and zero_policy == ZERO_GOLDEN_ERROR:
            raise ValueError(
                f"word {word:#010x} has a zero golden value; its relative "
                "error is undefined (enable the zero-golden exclusion)"
            )
        drop = zero_policy == ZERO_GOLDEN_DROP
        f_active = fcls in (CLS_FINITE, CLS_SUB)
        p_active = pcls == CLS_FINITE
        f_counted = not (f_zero and drop)
        p_counted = not (p_zero and drop)
        t["float_zero_golden_skipped"] += f_zero
        t["posit_zero_golden_skipped"] += p_zero
        t["float_injections"] += 32 * f_counted
        t["posit_injections"] += 32 * p_counted
        t["trials"] += 32
        f_parts = []  # (A, t) accumulators
        p_parts = []
        nsp_f = nsp_p = 0
        for bit in range(32):
            mask = 1 << bit
            if mbu:
                mask |= 1 << second_bit(seed, word_index, bit)
            wc = word ^ mask
            cfc, cfn, cfm, cfe = decode_float_parts(wc)
            cpc, cpn, cpm, cpe = decode_posit_parts(wc)
            if f_counted:
                if cfc == CLS_NAN:
                    t["float_nan_created"] += 1
                elif cfc == CLS_INF:
                    t["float_inf_created"] += 1
            if p_counted and cpc == CLS_NAR:
                t["posit_nar_created"] += 1
            f_ok = cfc in _VALUED
            p_ok = cpc in _VALUED
            rf = rp = None
            if f_counted:
                if not f_ok:
                    nsp_f += 1
                elif f_active:
                    rf = _rel_parts(fneg, fm, fe, cfc, cfn, cfm, cfe)
                    f_parts.append(rf)
            if p_counted:
                if not p_ok:
                    nsp_p += 1
                elif p_active:
                    rp = _rel_parts(pneg, pm, pe, cpc, cpn, cpm, cpe)
                    p_parts.append(rp)
            if rf is not None and rp is not None:
                af, tf = rf
                ap, tp = rp
                lhs = (ap * fm) << tf
                rhs = (af * pm) << tp
                if lhs < rhs:
                    t["posit_wins"] += 1
                elif lhs > rhs:
                    t["float_wins"] += 1
                else:
                    t["ties"] += 1
            else:
                t["incomparable"] += 1
        records.append(
            _mred_pair(fm, f_parts) + (nsp_f,) + _mred_pair(pm, p_parts) + (nsp_p,)
        )
    return records, t


def _mred_pair(mg, parts):
    """(n_valid, num, den) for the exact mean of accumulated rel errors."""
    n = len(parts)
    if n == 0:
        return (0, None, None)
    tmax = max(p[1] for p in parts)
    num = sum(a << (tmax - ti) for a, ti in parts)
    return (n, num, (mg << tmax) * n)
