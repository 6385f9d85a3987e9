"""Compiled successive-cancellation kernels.

Workspace layout: the LLRs of the active node at level L (block size 2**L)
live in ``llr_buf[2**L - 1 : 2**(L + 1) - 1]``; level k holds the channel
LLRs.  ``left_buf``/``right_buf`` use the same offsets for the re-encoded
partial sums of the most recent left/right child at each level.
"""

import math

from numba import njit

LLR_CLAMP = 40.0
TIE_BAND = 1e-9


@njit(nogil=True, cache=True)
def _clamp(x):
    if x > LLR_CLAMP:
        return LLR_CLAMP
    if x < -LLR_CLAMP:
        return -LLR_CLAMP
    return x


@njit(nogil=True, cache=True)
def check_node(a, b):
    """2*atanh(tanh(a/2)*tanh(b/2)) in a form that stays finite for large |a|, |b|."""
    s = 1.0
    if a < 0.0:
        s = -s
    if b < 0.0:
        s = -s
    if a == 0.0 or b == 0.0:
        s = 0.0
    m = min(abs(a), abs(b))
    r = s * m + math.log1p(math.exp(-abs(a + b))) - math.log1p(math.exp(-abs(a - b)))
    return _clamp(r)


@njit(nogil=True, cache=True)
def sc_kernel(channel_llr, frozen_mask, frozen_values, truth, genie,
              u_hat, flags, posterior, llr_buf, left_buf, right_buf):
    """Decode one block in natural index order; returns the operation count.

    With ``genie`` set, every free decision is compared with ``truth`` (a
    mismatch or a tie sets ``flags[i]``) and the true bit is used from then on.
    ``posterior[i]`` receives the error probability of that decision given the
    channel output and the true past, with a tie counted as 1.
    """
    n = channel_llr.shape[0]
    k = 0
    while (1 << k) < n:
        k += 1
    base = n - 1
    for j in range(n):
        llr_buf[base + j] = _clamp(channel_llr[j])
    ops = 0
    for i in range(n):
        if i == 0:
            start = k
        else:
            t = 0
            while ((i >> t) & 1) == 0:
                t += 1
            start = t + 1
        for lam in range(start, 0, -1):
            h = 1 << (lam - 1)
            parent = (1 << lam) - 1
            child = h - 1
            if (i >> (lam - 1)) & 1:
                for j in range(h):
                    a = llr_buf[parent + j]
                    b = llr_buf[parent + h + j]
                    if left_buf[child + j]:
                        llr_buf[child + j] = _clamp(b - a)
                    else:
                        llr_buf[child + j] = _clamp(b + a)
            else:
                for j in range(h):
                    llr_buf[child + j] = check_node(llr_buf[parent + j], llr_buf[parent + h + j])
            ops += h

        llr = llr_buf[0]
        flag = False
        if frozen_mask[i]:
            bit = int(frozen_values[i])
        else:
            bit = 1 if llr < -TIE_BAND else 0
            if genie:
                tie = abs(llr) <= TIE_BAND
                flag = bit != int(truth[i]) or tie
                posterior[i] = 1.0 if tie else 1.0 / (1.0 + math.exp(abs(llr)))
                bit = int(truth[i])
        u_hat[i] = bit
        flags[i] = flag

        if (i & 1) == 0:
            left_buf[0] = bit
        else:
            right_buf[0] = bit
            lam = 1
            while True:
                h = 1 << (lam - 1)
                child = h - 1
                node = (1 << lam) - 1
                if lam == k or ((i >> lam) & 1) == 0:
                    for j in range(h):
                        left_buf[node + j] = left_buf[child + j] ^ right_buf[child + j]
                        left_buf[node + h + j] = right_buf[child + j]
                    ops += h
                    break
                for j in range(h):
                    right_buf[node + j] = left_buf[child + j] ^ right_buf[child + j]
                    right_buf[node + h + j] = right_buf[child + j]
                ops += h
                lam += 1
    return ops
