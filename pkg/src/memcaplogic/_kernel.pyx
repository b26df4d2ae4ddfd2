# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled RK4 segment integrator for coupled membrane memcapacitors.

Mirrors :mod:`memcaplogic._kernel_py` operation for operation, so both
backends produce bit-identical trajectories.
"""

from libc.math cimport isfinite

cdef enum:
    MAXDEV = 3
    MAXSTATE = 9

cdef double FOUR_PI_SQ = 39.47841760435743
cdef double COLLAPSE_Y = -1.0 + 1e-6


cdef inline void _deriv(const double* s, double* d, int n_dev, int m, int topo,
                        const double* coef, const double* scale,
                        double b1, double b2) noexcept nogil:
    cdef double inv1y[MAXDEV]
    cdef double c[MAXDEV]
    cdef double src[MAXDEV]
    cdef double inv, y, v, q, bc, f
    cdef int i
    for i in range(n_dev):
        inv1y[i] = 1.0 / (1.0 + s[i * m])
        c[i] = scale[i] * inv1y[i]
    if topo == 0:
        src[0] = b1
    elif topo == 1:
        inv = 1.0 / (c[0] + c[1])
        src[0] = c[1] * (b2 - b1) * inv
        src[1] = c[0] * (b1 - b2) * inv
    else:
        inv = 1.0 / (c[0] + c[1] + c[2])
        src[0] = (c[1] * b2 - (c[1] + c[2]) * b1) * inv
        src[1] = (c[0] * b1 - (c[0] + c[2]) * b2) * inv
        src[2] = (c[0] * b1 + c[1] * b2) * inv
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


cdef inline void _deriv_plain(const double* s, double* d, int topo,
                              const double* coef, const double* scale,
                              double b1, double b2) noexcept nogil:
    # resistance-free fast path: same arithmetic as _deriv with m == 2
    cdef double i0, i1, i2, c0, c1, c2, inv, f0, f1, f2, y
    i0 = 1.0 / (1.0 + s[0])
    c0 = scale[0] * i0
    if topo == 0:
        f0 = b1 * i0
    elif topo == 1:
        i1 = 1.0 / (1.0 + s[2])
        c1 = scale[1] * i1
        inv = 1.0 / (c0 + c1)
        f0 = c1 * (b2 - b1) * inv * i0
        f1 = c0 * (b1 - b2) * inv * i1
        y = s[2]
        d[2] = s[3]
        d[3] = -FOUR_PI_SQ * y * (y * y - coef[5]) * coef[6] - coef[4] * s[3] - f1 * f1
    else:
        i1 = 1.0 / (1.0 + s[2])
        i2 = 1.0 / (1.0 + s[4])
        c1 = scale[1] * i1
        c2 = scale[2] * i2
        inv = 1.0 / (c0 + c1 + c2)
        f0 = (c1 * b2 - (c1 + c2) * b1) * inv * i0
        f1 = (c0 * b1 - (c0 + c2) * b2) * inv * i1
        f2 = (c0 * b1 + c1 * b2) * inv * i2
        y = s[2]
        d[2] = s[3]
        d[3] = -FOUR_PI_SQ * y * (y * y - coef[5]) * coef[6] - coef[4] * s[3] - f1 * f1
        y = s[4]
        d[4] = s[5]
        d[5] = -FOUR_PI_SQ * y * (y * y - coef[9]) * coef[10] - coef[8] * s[5] - f2 * f2
    y = s[0]
    d[0] = s[1]
    d[1] = -FOUR_PI_SQ * y * (y * y - coef[1]) * coef[2] - coef[0] * s[1] - f0 * f0


cdef inline void _eval(const double* s, double* d, int n_dev, int m, int topo,
                       const double* coef, const double* scale,
                       double b1, double b2) noexcept nogil:
    if m == 2:
        _deriv_plain(s, d, topo, coef, scale, b1, b2)
    else:
        _deriv(s, d, n_dev, m, topo, coef, scale, b1, b2)


cdef inline void _rk4(double* s, int n, double h, int n_dev, int m, int topo,
                      const double* coef, const double* scale,
                      double b1, double b2) noexcept nogil:
    cdef double k1[MAXSTATE]
    cdef double k2[MAXSTATE]
    cdef double k3[MAXSTATE]
    cdef double k4[MAXSTATE]
    cdef double tmp[MAXSTATE]
    cdef double hh = 0.5 * h
    cdef double h6 = h / 6.0
    cdef int j
    _eval(s, k1, n_dev, m, topo, coef, scale, b1, b2)
    for j in range(n):
        tmp[j] = s[j] + hh * k1[j]
    _eval(tmp, k2, n_dev, m, topo, coef, scale, b1, b2)
    for j in range(n):
        tmp[j] = s[j] + hh * k2[j]
    _eval(tmp, k3, n_dev, m, topo, coef, scale, b1, b2)
    for j in range(n):
        tmp[j] = s[j] + h * k3[j]
    _eval(tmp, k4, n_dev, m, topo, coef, scale, b1, b2)
    for j in range(n):
        s[j] = s[j] + h6 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])


def derivative(double[::1] state, int n_dev, int topo,
               double[::1] coef, double[::1] scale, double b1, double b2):
    """Return the packed state derivative as a list (testing aid)."""
    cdef int n = state.shape[0]
    cdef int m = n // n_dev
    cdef double d[MAXSTATE]
    _eval(&state[0], d, n_dev, m, topo, &coef[0], &scale[0], b1, b2)
    return [d[j] for j in range(n)]


def run_segment(double[::1] state, int n_dev, int topo,
                double[::1] coef, double[::1] scale, double b1, double b2,
                double h, long n_full, double h_last,
                long stride, double[:, ::1] rec):
    """Advance ``state`` in place through one constant-drive segment.

    ``coef`` holds four numbers per device: damping, y0**2, 1/y0**2 and
    2/rho (unused unless the state carries a charge column).

    Takes ``n_full`` RK4 steps of size ``h`` followed by one step of
    ``h_last`` when it is positive. Every ``stride``-th step and the final
    step are copied into consecutive rows of ``rec`` (``stride <= 0``
    disables recording).

    Returns
    -------
    tuple
        ``(n_recorded, status, step, device)`` where status is 0 on success,
        1 on collapse and 2 on a non-finite state.
    """
    cdef int n = state.shape[0]
    cdef int m = n // n_dev
    cdef long total = n_full + (1 if h_last > 0.0 else 0)
    cdef long k, nrec = 0
    cdef int i, j, status = 0, bad = -1
    cdef double hk
    cdef double* s = &state[0]
    with nogil:
        for k in range(1, total + 1):
            hk = h if k <= n_full else h_last
            _rk4(s, n, hk, n_dev, m, topo, &coef[0], &scale[0], b1, b2)
            for j in range(n):
                if not isfinite(s[j]):
                    status = 2
                    bad = j // m
                    break
            if status == 0:
                for i in range(n_dev):
                    if s[i * m] <= COLLAPSE_Y:
                        status = 1
                        bad = i
                        break
            if status != 0:
                break
            if stride > 0 and (k % stride == 0 or k == total):
                for j in range(n):
                    rec[nrec, j] = s[j]
                nrec += 1
    if status != 0:
        return nrec, status, k, bad
    return nrec, 0, total, -1
