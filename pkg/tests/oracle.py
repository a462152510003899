"""Loop-based reference implementations for finite channels.

Written directly from the definitions with plain Python floats, sharing no
code with the package, so they serve as an independent check.
"""

import math


def bits_of(label, m):
    return [(label >> (m - 1 - i)) & 1 for i in range(m)]


def _h(ps):
    return -sum(p * math.log2(p) for p in ps if p > 0)


def joint_entropy(p):
    return _h(p)


def mutual_information(p, T):
    n, k = len(p), len(T[0])
    py = [sum(p[a] * T[a][y] for a in range(n)) for y in range(k)]
    out = 0.0
    for a in range(n):
        for y in range(k):
            pj = p[a] * T[a][y]
            if pj > 0:
                out += pj * math.log2(T[a][y] / py[y])
    return out


def bit_marginal(p, m, i, b):
    return sum(p[a] for a in range(len(p)) if bits_of(a, m)[i] == b)


def bit_likelihood(p, T, m, i, b, y):
    """p_{Y|B_i}(y|b); None if P_{B_i}(b) = 0."""
    pb = bit_marginal(p, m, i, b)
    if pb == 0:
        return None
    return sum(p[a] * T[a][y] for a in range(len(p)) if bits_of(a, m)[i] == b) / pb


def bit_conditional_entropy(p, T, m, i):
    k = len(T[0])
    out = 0.0
    for y in range(k):
        pby = [sum(p[a] * T[a][y] for a in range(len(p)) if bits_of(a, m)[i] == b) for b in (0, 1)]
        py = pby[0] + pby[1]
        for v in pby:
            if v > 0:
                out -= v * math.log2(v / py)
    return out


def bmd_raw(p, T, m):
    return joint_entropy(p) - sum(bit_conditional_entropy(p, T, m, i) for i in range(m))


def bit_mi(p, T, m, i):
    pb = [bit_marginal(p, m, i, b) for b in (0, 1)]
    return _h(pb) - bit_conditional_entropy(p, T, m, i)


def q_bmd(p, T, m, y, a):
    out = 1.0
    for i, b in enumerate(bits_of(a, m)):
        v = bit_likelihood(p, T, m, i, b, y)
        out *= 0.0 if v is None else v
    return out


def generic_rate(p, T, qfun, s, r):
    """E[log2(q^s r(B) / sum_{a in supp} P(a) q(Y,a)^s r(a))], with 0 log 0 = 0."""
    n, k = len(p), len(T[0])
    supp = [a for a in range(n) if p[a] > 0]
    out = 0.0
    for y in range(k):
        den = sum(p[a] * qfun(y, a) ** s * r[a] for a in supp)
        for a in supp:
            pj = p[a] * T[a][y]
            if pj > 0:
                out += pj * math.log2(qfun(y, a) ** s * r[a] / den)
    return out


def r_bmd(p, m):
    out = []
    for a in range(len(p)):
        if p[a] > 0:
            prod = 1.0
            for i, b in enumerate(bits_of(a, m)):
                prod *= bit_marginal(p, m, i, b)
            out.append(prod / p[a])
        else:
            out.append(float("nan"))
    return out


def lm_instance(p, T, m):
    return generic_rate(p, T, lambda y, a: q_bmd(p, T, m, y, a), 1.0, r_bmd(p, m))
