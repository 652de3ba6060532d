# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sweep/round-trip kernels; bit-exact mirror of _pykernels.

Decodes run entirely in C on (mantissa, exponent) pairs.  Exactness is
kept by routing any quantity that can exceed 128 bits (large exponent
gaps between golden and corrupted values) through Python integers; the
common fraction/low-exponent flips stay in C.
"""

import numpy as np

from libc.stdint cimport int64_t, uint32_t, uint64_t

cdef extern from *:
    ctypedef unsigned long long u128 "unsigned __int128"

BACKEND = "cython"

DEF CLS_FINITE = 0
DEF CLS_ZERO = 1
DEF CLS_SUB = 2
DEF CLS_INF = 3
DEF CLS_NAN = 4
DEF CLS_NAR = 5

# keep in sync with _pykernels.TALLY_KEYS
_TALLY_KEYS = (
    "trials", "posit_wins", "float_wins", "ties", "incomparable",
    "float_nan_created", "float_inf_created", "posit_nar_created",
    "float_zero_golden_skipped", "posit_zero_golden_skipped",
    "float_injections", "posit_injections",
)


cdef struct Dec:
    int cls
    int neg
    uint64_t m
    int e


cdef inline int bitlen64(uint64_t x) nogil:
    cdef int n = 0
    while x:
        x >>= 1
        n += 1
    return n


cdef inline void dec_float(uint32_t w, Dec* out) nogil:
    cdef uint32_t exp = (w >> 23) & 0xFF
    cdef uint32_t frac = w & 0x7FFFFF
    out.neg = w >> 31
    if exp == 0xFF:
        out.cls = CLS_NAN if frac else CLS_INF
        out.m = 0
        out.e = 0
    elif exp == 0:
        if frac == 0:
            out.cls = CLS_ZERO
            out.m = 0
            out.e = 0
        else:
            out.cls = CLS_SUB
            out.m = frac
            out.e = -149
    else:
        out.cls = CLS_FINITE
        out.m = (1 << 23) | frac
        out.e = <int>exp - 150


cdef inline void dec_posit(uint32_t w, Dec* out) nogil:
    cdef uint32_t body, inv, rest
    cdef int run, k, rem, e_avail, expf, wf
    if w == 0:
        out.cls = CLS_ZERO
        out.neg = 0
        out.m = 0
        out.e = 0
        return
    if w == 0x80000000u:
        out.cls = CLS_NAR
        out.neg = 0
        out.m = 0
        out.e = 0
        return
    out.neg = w >> 31
    body = ((-w) if out.neg else w) & 0x7FFFFFFFu
    if body >> 30:
        inv = (~body) & 0x7FFFFFFFu
        run = 31 if inv == 0 else 31 - bitlen64(inv)
        k = run - 1
    else:
        run = 31 - bitlen64(body)
        k = -run
    rem = 31 - run - 1
    if rem < 0:
        rem = 0
    rest = body & ((1u << rem) - 1)
    e_avail = 2 if rem >= 2 else rem
    expf = ((rest >> (rem - e_avail)) << (2 - e_avail)) if e_avail else 0
    wf = rem - e_avail
    out.cls = CLS_FINITE
    out.m = (1u << wf) | (rest & ((1u << wf) - 1))
    out.e = 4 * k + expf - wf


cdef inline uint32_t enc_float(int neg, uint64_t m, int e) nogil:
    cdef int s = e + bitlen64(m) - 1
    cdef int eb, t, sh
    cdef uint64_t q, rem, half
    if s >= 128:
        return (<uint32_t>neg << 31) | 0x7F800000u
    eb = s if s > -126 else -126
    t = e + 23 - eb
    if t >= 0:
        q = m << t
    else:
        sh = -t
        q = m >> sh
        rem = m & ((<uint64_t>1 << sh) - 1)
        half = <uint64_t>1 << (sh - 1)
        if rem > half or (rem == half and q & 1):
            q += 1
    if q >> 24:
        q >>= 1
        eb += 1
    if eb > 127:
        return (<uint32_t>neg << 31) | 0x7F800000u
    if q < (1 << 23):
        return (<uint32_t>neg << 31) | <uint32_t>q
    return (<uint32_t>neg << 31) | (<uint32_t>(eb + 127) << 23) | <uint32_t>(q - (1 << 23))


cdef inline uint32_t enc_posit(int neg, uint64_t m, int e) nogil:
    cdef int s = e + bitlen64(m) - 1
    cdef int k, exp, reg_len, wf, body_len, shift
    cdef uint64_t regime, frac, body, guard, sticky
    cdef uint32_t pattern
    if s > 120:
        pattern = 0x7FFFFFFFu
    elif s < -120:
        pattern = 1
    else:
        k = s >> 2
        exp = s & 3
        if k >= 0:
            reg_len = k + 2
            regime = ((<uint64_t>1 << (k + 1)) - 1) << 1
        else:
            reg_len = -k + 1
            regime = 1
        wf = bitlen64(m) - 1
        frac = m - (<uint64_t>1 << wf)
        body = ((regime << 2 | <uint64_t>exp) << wf) | frac
        body_len = reg_len + 2 + wf
        if body_len <= 31:
            pattern = <uint32_t>(body << (31 - body_len))
        else:
            shift = body_len - 31
            pattern = <uint32_t>(body >> shift)
            guard = (body >> (shift - 1)) & 1
            sticky = body & ((<uint64_t>1 << (shift - 1)) - 1)
            if guard and (sticky or pattern & 1):
                pattern += 1
            if pattern >= 0x80000000u:
                pattern = 0x7FFFFFFFu
        if pattern == 0:
            pattern = 1
    return ((-pattern) & 0xFFFFFFFFu) if neg else pattern


def decode_float_parts(word):
    cdef Dec d
    dec_float(<uint32_t>word, &d)
    return (d.cls, d.neg, d.m, d.e)


def decode_posit_parts(word):
    cdef Dec d
    dec_posit(<uint32_t>word, &d)
    return (d.cls, d.neg, d.m, d.e)


def encode_float_parts(neg, m, e):
    return enc_float(<int>neg, <uint64_t>m, <int>e)


def encode_posit_parts(neg, m, e):
    return enc_posit(<int>neg, <uint64_t>m, <int>e)


def roundtrip_failures(words):
    """Count decode->encode mismatches for both formats over ``words``."""
    arr = np.ascontiguousarray(words, dtype=np.uint32)
    cdef uint32_t[::1] mv = arr
    cdef Py_ssize_t i, n = mv.shape[0]
    cdef long long ffail = 0, pfail = 0
    cdef uint32_t w
    cdef Dec d
    with nogil:
        for i in range(n):
            w = mv[i]
            dec_float(w, &d)
            if d.cls == CLS_INF:
                if ((<uint32_t>d.neg << 31) | 0x7F800000u) != w:
                    ffail += 1
            elif d.cls == CLS_ZERO:
                if (<uint32_t>d.neg << 31) != w:
                    ffail += 1
            elif d.cls != CLS_NAN:
                if enc_float(d.neg, d.m, d.e) != w:
                    ffail += 1
            dec_posit(w, &d)
            if d.cls == CLS_ZERO:
                if w != 0:
                    pfail += 1
            elif d.cls != CLS_NAR:
                if enc_posit(d.neg, d.m, d.e) != w:
                    pfail += 1
    return ffail, pfail


cdef inline uint64_t splitmix(uint64_t state) nogil:
    cdef uint64_t z = state
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef inline int c_second_bit(uint64_t seed, uint64_t word_index, int first_bit) nogil:
    cdef uint64_t counter = word_index * 32 + <uint64_t>first_bit
    cdef int r = <int>(splitmix(seed + counter * <uint64_t>0x9E3779B97F4A7C15) % 31)
    return r + 1 if r >= first_bit else r


def second_bit(seed, word_index, first_bit):
    return c_second_bit(<uint64_t>seed, <uint64_t>word_index, <int>first_bit)


def second_bit_histogram(seed, first_bit, n, start_index=0):
    cdef uint64_t s = <uint64_t>seed
    cdef uint64_t i, lo = <uint64_t>start_index, hi = <uint64_t>(start_index + n)
    cdef int fb = <int>first_bit
    cdef long long counts[32]
    cdef int j
    for j in range(32):
        counts[j] = 0
    with nogil:
        for i in range(lo, hi):
            counts[c_second_bit(s, i, fb)] += 1
    return [counts[j] for j in range(32)]


cdef object _u128_to_int(u128 x):
    return (int(<uint64_t>(x >> 64)) << 64) | int(<uint64_t>x)


cdef object _rel_big(Dec* g, Dec* c):
    """(A, t) via Python ints for exponent gaps beyond the C fast path."""
    cdef object mg = g.m
    cdef object mc = c.m
    cdef int d = c.e - g.e
    cdef object shifted, a
    if d >= 0:
        shifted = mc << d
        if c.neg == g.neg:
            a = mg - shifted if mg >= shifted else shifted - mg
        else:
            a = mg + shifted
        return (a, 0)
    shifted = mg << (-d)
    if c.neg == g.neg:
        a = shifted - mc if shifted >= mc else mc - shifted
    else:
        a = shifted + mc
    return (a, -d)


cdef object _mred_pair(uint64_t gm, int n_small, uint64_t* As, int* ts, list bigs):
    """(n_valid, num, den) for the exact mean of accumulated rel errors."""
    cdef int n = n_small + (len(bigs) if bigs is not None else 0)
    if n == 0:
        return (0, None, None)
    cdef int i, t_small = 0, T
    cdef u128 acc = 0
    for i in range(n_small):
        if ts[i] > t_small:
            t_small = ts[i]
    for i in range(n_small):
        acc += (<u128>As[i]) << (t_small - ts[i])
    total = _u128_to_int(acc)
    T = t_small
    if bigs is not None:
        for a_obj, t_obj in bigs:
            if <int>t_obj > T:
                T = <int>t_obj
        if T > t_small:
            total = total << (T - t_small)
        for a_obj, t_obj in bigs:
            total = total + (a_obj << (T - <int>t_obj))
    return (n, total, (int(gm) << T) * n)


def sweep_chunk(words, base_index, mbu, seed, zero_policy):
    """Fault-inject every bit of every word through both codecs.

    Same record/tally contract as the pure-Python backend.
    """
    arr = np.ascontiguousarray(words, dtype=np.uint32)
    cdef uint32_t[::1] mv = arr
    cdef Py_ssize_t wi, n_words = mv.shape[0]
    cdef uint64_t base = <uint64_t>base_index
    cdef uint64_t sd = <uint64_t>seed
    cdef bint is_mbu = <bint>mbu
    cdef int zpol = <int>zero_policy

    cdef long long trials = 0, posit_wins = 0, float_wins = 0, ties = 0
    cdef long long incomparable = 0, nan_created = 0, inf_created = 0
    cdef long long nar_created = 0, fzero = 0, pzero = 0
    cdef long long finj = 0, pinj = 0

    cdef uint32_t word, wc, mask
    cdef Dec fg, pg, fc, pc
    cdef int bit, d
    cdef bint f_zero, p_zero, f_active, p_active, f_counted, p_counted
    cdef bint f_ok, p_ok, rf_small, rp_small, have_rf, have_rp
    cdef uint64_t fA, pA, shifted
    cdef int ft, pt
    cdef u128 lhs, rhs
    cdef uint64_t As_f[32]
    cdef int ts_f[32]
    cdef uint64_t As_p[32]
    cdef int ts_p[32]
    cdef int nf, np_
    cdef int nsp_f, nsp_p
    cdef list big_f, big_p
    cdef object rf_obj, rp_obj, lhs_o, rhs_o

    records = []
    for wi in range(n_words):
        word = mv[wi]
        dec_float(word, &fg)
        dec_posit(word, &pg)
        f_zero = fg.cls == CLS_ZERO
        p_zero = pg.cls == CLS_ZERO
        if (f_zero or p_zero) and zpol == 0:
            raise ValueError(
                f"word {int(word):#010x} has a zero golden value; its relative "
                "error is undefined (enable the zero-golden exclusion)"
            )
        f_active = fg.cls == CLS_FINITE or fg.cls == CLS_SUB
        p_active = pg.cls == CLS_FINITE
        f_counted = not (f_zero and zpol == 2)
        p_counted = not (p_zero and zpol == 2)
        fzero += f_zero
        pzero += p_zero
        finj += 32 * f_counted
        pinj += 32 * p_counted
        trials += 32
        nf = 0
        np_ = 0
        nsp_f = 0
        nsp_p = 0
        big_f = None
        big_p = None
        for bit in range(32):
            mask = <uint32_t>1 << bit
            if is_mbu:
                mask |= <uint32_t>1 << c_second_bit(sd, base + <uint64_t>wi, bit)
            wc = word ^ mask
            dec_float(wc, &fc)
            dec_posit(wc, &pc)
            if f_counted:
                if fc.cls == CLS_NAN:
                    nan_created += 1
                elif fc.cls == CLS_INF:
                    inf_created += 1
            if p_counted and pc.cls == CLS_NAR:
                nar_created += 1
            f_ok = fc.cls <= CLS_SUB
            p_ok = pc.cls <= CLS_SUB
            have_rf = False
            have_rp = False
            rf_small = False
            rp_small = False
            rf_obj = None
            rp_obj = None
            if f_counted:
                if not f_ok:
                    nsp_f += 1
                elif f_active:
                    have_rf = True
                    if fc.m == 0:
                        fA = fg.m
                        ft = 0
                        rf_small = True
                    else:
                        d = fc.e - fg.e
                        if -33 <= d <= 33:
                            rf_small = True
                            if d >= 0:
                                shifted = fc.m << d
                                if fc.neg == fg.neg:
                                    fA = fg.m - shifted if fg.m >= shifted else shifted - fg.m
                                else:
                                    fA = fg.m + shifted
                                ft = 0
                            else:
                                shifted = fg.m << (-d)
                                if fc.neg == fg.neg:
                                    fA = shifted - fc.m if shifted >= fc.m else fc.m - shifted
                                else:
                                    fA = shifted + fc.m
                                ft = -d
                        else:
                            rf_obj = _rel_big(&fg, &fc)
                    if rf_small:
                        As_f[nf] = fA
                        ts_f[nf] = ft
                        nf += 1
                    else:
                        if big_f is None:
                            big_f = []
                        big_f.append(rf_obj)
            if p_counted:
                if not p_ok:
                    nsp_p += 1
                elif p_active:
                    have_rp = True
                    if pc.m == 0:
                        pA = pg.m
                        pt = 0
                        rp_small = True
                    else:
                        d = pc.e - pg.e
                        if -33 <= d <= 33:
                            rp_small = True
                            if d >= 0:
                                shifted = pc.m << d
                                if pc.neg == pg.neg:
                                    pA = pg.m - shifted if pg.m >= shifted else shifted - pg.m
                                else:
                                    pA = pg.m + shifted
                                pt = 0
                            else:
                                shifted = pg.m << (-d)
                                if pc.neg == pg.neg:
                                    pA = shifted - pc.m if shifted >= pc.m else pc.m - shifted
                                else:
                                    pA = shifted + pc.m
                                pt = -d
                        else:
                            rp_obj = _rel_big(&pg, &pc)
                    if rp_small:
                        As_p[np_] = pA
                        ts_p[np_] = pt
                        np_ += 1
                    else:
                        if big_p is None:
                            big_p = []
                        big_p.append(rp_obj)
            if have_rf and have_rp:
                if rf_small and rp_small:
                    # rel_p ? rel_f  <=>  (pA * fg.m) << ft  ?  (fA * pg.m) << pt
                    lhs = ((<u128>pA) * fg.m) << ft
                    rhs = ((<u128>fA) * pg.m) << pt
                    if lhs < rhs:
                        posit_wins += 1
                    elif lhs > rhs:
                        float_wins += 1
                    else:
                        ties += 1
                else:
                    if rf_small:
                        rf_obj = (int(fA), ft)
                    if rp_small:
                        rp_obj = (int(pA), pt)
                    lhs_o = (rp_obj[0] * int(fg.m)) << rf_obj[1]
                    rhs_o = (rf_obj[0] * int(pg.m)) << rp_obj[1]
                    if lhs_o < rhs_o:
                        posit_wins += 1
                    elif lhs_o > rhs_o:
                        float_wins += 1
                    else:
                        ties += 1
            else:
                incomparable += 1
        records.append(
            _mred_pair(fg.m, nf, As_f, ts_f, big_f)
            + (nsp_f,)
            + _mred_pair(pg.m, np_, As_p, ts_p, big_p)
            + (nsp_p,)
        )
    tallies = dict(zip(_TALLY_KEYS, (
        trials, posit_wins, float_wins, ties, incomparable,
        nan_created, inf_created, nar_created,
        fzero, pzero, finj, pinj,
    )))
    return records, tallies
