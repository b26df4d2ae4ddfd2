"""Pure-Python RK4 segment integrator.

Fallback for :mod:`memcaplogic._kernel`. The arithmetic is written in the
same order as the compiled kernel so results agree bit for bit.
"""

import math

FOUR_PI_SQ = 39.47841760435743
COLLAPSE_Y = -1.0 + 1e-6


def _deriv(s, n_dev, m, topo, coef, scale, b1, b2):
    inv1y = [1.0 / (1.0 + s[i * m]) for i in range(n_dev)]
    c = [scale[i] * inv1y[i] for i in range(n_dev)]
    if topo == 0:
        src = [b1]
    elif topo == 1:
        inv = 1.0 / (c[0] + c[1])
        src = [c[1] * (b2 - b1) * inv, c[0] * (b1 - b2) * inv]
    else:
        inv = 1.0 / (c[0] + c[1] + c[2])
        src = [
            (c[1] * b2 - (c[1] + c[2]) * b1) * inv,
            (c[0] * b1 - (c[0] + c[2]) * b2) * inv,
            (c[0] * b1 + c[1] * b2) * inv,
        ]
    d = [0.0] * (n_dev * m)
    for i in range(n_dev):
        y = s[i * m]
        v = s[i * m + 1]
        if m == 3:
            bc = s[i * m + 2] * (1.0 + y)
            d[i * m + 2] = (src[i] - bc) * coef[4 * i + 3]
        else:
            bc = src[i]
        f = bc * inv1y[i]
        d[i * m] = v
        d[i * m + 1] = (-FOUR_PI_SQ * y * (y * y - coef[4 * i + 1]) * coef[4 * i + 2]
                        - coef[4 * i] * v - f * f)
    return d


def _rk4(s, h, n_dev, m, topo, coef, scale, b1, b2):
    hh = 0.5 * h
    h6 = h / 6.0
    k1 = _deriv(s, n_dev, m, topo, coef, scale, b1, b2)
    k2 = _deriv([a + hh * b for a, b in zip(s, k1)], n_dev, m, topo, coef, scale, b1, b2)
    k3 = _deriv([a + hh * b for a, b in zip(s, k2)], n_dev, m, topo, coef, scale, b1, b2)
    k4 = _deriv([a + h * b for a, b in zip(s, k3)], n_dev, m, topo, coef, scale, b1, b2)
    return [
        s[j] + h6 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
        for j in range(len(s))
    ]


def derivative(state, n_dev, topo, coef, scale, b1, b2):
    """Return the packed state derivative as a list (testing aid)."""
    s = [float(x) for x in state]
    return _deriv(s, n_dev, len(s) // n_dev, topo, list(coef), list(scale), b1, b2)


def run_segment(state, n_dev, topo, coef, scale, b1, b2, h, n_full, h_last, stride, rec):
    """Same contract as the compiled ``run_segment``; ``state`` is updated in place."""
    n = len(state)
    m = n // n_dev
    coef, scale = list(coef), list(scale)
    s = [float(x) for x in state]
    total = n_full + (1 if h_last > 0.0 else 0)
    nrec = 0
    status, bad, k = 0, -1, 0
    for k in range(1, total + 1):
        hk = h if k <= n_full else h_last
        s = _rk4(s, hk, n_dev, m, topo, coef, scale, b1, b2)
        for j in range(n):
            if not math.isfinite(s[j]):
                status, bad = 2, j // m
                break
        if status == 0:
            for i in range(n_dev):
                if s[i * m] <= COLLAPSE_Y:
                    status, bad = 1, i
                    break
        if status:
            break
        if stride > 0 and (k % stride == 0 or k == total):
            rec[nrec, :] = s
            nrec += 1
    state[:] = s
    if status:
        return nrec, status, k, bad
    return nrec, 0, total, -1
