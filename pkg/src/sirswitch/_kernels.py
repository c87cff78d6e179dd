"""Hot numerical kernels, written in plain Python.

Every function here is self-contained (no calls into this module) so the
backend loader can wrap each one with numba.njit independently; the pure
Python originals remain usable as the fallback backend. All kernels except
stay_sweep use only +,-,*,/ so both backends produce bit-identical floats.

Status convention: -1 means success; a nonnegative value is the index of the
failing segment / parent / start. Failure means the step left the triangle
{s >= 0, i >= 0, s + i <= N} by more than `tol` (caller raises).
"""

import math

import numpy as np


def rk4_span(a, b, c, N, s, i, duration, h, tol):
    """Advance (s, i) through `duration` with fixed RK4 steps of size h.

    The final partial step is shortened to land exactly on `duration`
    (skipped when below 1e-12*h). Returns (s, i, ok).
    """
    nfull = int(duration / h)
    rem = duration - nfull * h
    extra = 1 if rem > 1e-12 * h else 0
    for q in range(nfull + extra):
        dt = h if q < nfull else rem
        k1s = -a * s * i + c * (N - s - i)
        k1i = (a * s - b) * i
        s2 = s + 0.5 * dt * k1s
        i2 = i + 0.5 * dt * k1i
        k2s = -a * s2 * i2 + c * (N - s2 - i2)
        k2i = (a * s2 - b) * i2
        s3 = s + 0.5 * dt * k2s
        i3 = i + 0.5 * dt * k2i
        k3s = -a * s3 * i3 + c * (N - s3 - i3)
        k3i = (a * s3 - b) * i3
        s4 = s + dt * k3s
        i4 = i + dt * k3i
        k4s = -a * s4 * i4 + c * (N - s4 - i4)
        k4i = (a * s4 - b) * i4
        s = s + (dt / 6.0) * (k1s + 2.0 * k2s + 2.0 * k3s + k4s)
        i = i + (dt / 6.0) * (k1i + 2.0 * k2i + 2.0 * k3i + k4i)
        if s < 0.0:
            if s < -tol:
                return s, i, False
            s = 0.0
        if i < 0.0:
            if i < -tol:
                return s, i, False
            i = 0.0
        over = s + i - N
        if over > 0.0:
            if over > tol:
                return s, i, False
            f = N / (s + i)
            s = s * f
            i = i * f
    return s, i, True


def integrate_schedule(ap, bp, cp, am, bm, cm, N, s0, i0, times, seg_env, h, tol, out_s, out_i):
    """Integrate across the event schedule `times`, one environment per segment.

    seg_env[k] selects the rates on [times[k], times[k+1]): 0 plus, 1 minus.
    Endpoint states are written to out_s/out_i (same length as times).
    """
    s = s0
    i = i0
    out_s[0] = s
    out_i[0] = i
    for k in range(times.shape[0] - 1):
        if seg_env[k] == 0:
            a = ap
            b = bp
            c = cp
        else:
            a = am
            b = bm
            c = cm
        duration = times[k + 1] - times[k]
        nfull = int(duration / h)
        rem = duration - nfull * h
        extra = 1 if rem > 1e-12 * h else 0
        for q in range(nfull + extra):
            dt = h if q < nfull else rem
            k1s = -a * s * i + c * (N - s - i)
            k1i = (a * s - b) * i
            s2 = s + 0.5 * dt * k1s
            i2 = i + 0.5 * dt * k1i
            k2s = -a * s2 * i2 + c * (N - s2 - i2)
            k2i = (a * s2 - b) * i2
            s3 = s + 0.5 * dt * k2s
            i3 = i + 0.5 * dt * k2i
            k3s = -a * s3 * i3 + c * (N - s3 - i3)
            k3i = (a * s3 - b) * i3
            s4 = s + dt * k3s
            i4 = i + dt * k3i
            k4s = -a * s4 * i4 + c * (N - s4 - i4)
            k4i = (a * s4 - b) * i4
            s = s + (dt / 6.0) * (k1s + 2.0 * k2s + 2.0 * k3s + k4s)
            i = i + (dt / 6.0) * (k1i + 2.0 * k2i + 2.0 * k3i + k4i)
            if s < 0.0:
                if s < -tol:
                    return k
                s = 0.0
            if i < 0.0:
                if i < -tol:
                    return k
                i = 0.0
            over = s + i - N
            if over > 0.0:
                if over > tol:
                    return k
                f = N / (s + i)
                s = s * f
                i = i * f
        out_s[k + 1] = s
        out_i[k + 1] = i
    return -1


def flow_marks(a, b, c, N, s, i, marks, h, tol, out):
    """Single-environment flow recording the state at each ascending mark time."""
    t_prev = 0.0
    for j in range(marks.shape[0]):
        duration = marks[j] - t_prev
        nfull = int(duration / h)
        rem = duration - nfull * h
        extra = 1 if rem > 1e-12 * h else 0
        for q in range(nfull + extra):
            dt = h if q < nfull else rem
            k1s = -a * s * i + c * (N - s - i)
            k1i = (a * s - b) * i
            s2 = s + 0.5 * dt * k1s
            i2 = i + 0.5 * dt * k1i
            k2s = -a * s2 * i2 + c * (N - s2 - i2)
            k2i = (a * s2 - b) * i2
            s3 = s + 0.5 * dt * k2s
            i3 = i + 0.5 * dt * k2i
            k3s = -a * s3 * i3 + c * (N - s3 - i3)
            k3i = (a * s3 - b) * i3
            s4 = s + dt * k3s
            i4 = i + dt * k3i
            k4s = -a * s4 * i4 + c * (N - s4 - i4)
            k4i = (a * s4 - b) * i4
            s = s + (dt / 6.0) * (k1s + 2.0 * k2s + 2.0 * k3s + k4s)
            i = i + (dt / 6.0) * (k1i + 2.0 * k2i + 2.0 * k3i + k4i)
            if s < 0.0:
                if s < -tol:
                    return j
                s = 0.0
            if i < 0.0:
                if i < -tol:
                    return j
                i = 0.0
            over = s + i - N
            if over > 0.0:
                if over > tol:
                    return j
                f = N / (s + i)
                s = s * f
                i = i * f
        out[j, 0] = s
        out[j, 1] = i
        t_prev = marks[j]
    return -1


def expand_cloud(a, b, c, N, parents, marks, h, tol, out):
    """flow_marks applied to every parent point; out has shape (n, m, 2).

    Parents march in lockstep through the shared mark schedule, so the inner
    loop runs over independent states and vectorizes; each parent sees the
    exact arithmetic of flow_marks. A failing parent is flagged, clamped and
    marched on (its output is discarded by the caller); the lowest failing
    index is returned, matching the one-parent-at-a-time semantics.
    """
    n = parents.shape[0]
    svec = np.empty(n)
    ivec = np.empty(n)
    bad = np.zeros(n, np.uint8)
    for r in range(n):
        svec[r] = parents[r, 0]
        ivec[r] = parents[r, 1]
    t_prev = 0.0
    for j in range(marks.shape[0]):
        duration = marks[j] - t_prev
        nfull = int(duration / h)
        rem = duration - nfull * h
        extra = 1 if rem > 1e-12 * h else 0
        for q in range(nfull + extra):
            dt = h if q < nfull else rem
            for r in range(n):
                s = svec[r]
                i = ivec[r]
                k1s = -a * s * i + c * (N - s - i)
                k1i = (a * s - b) * i
                s2 = s + 0.5 * dt * k1s
                i2 = i + 0.5 * dt * k1i
                k2s = -a * s2 * i2 + c * (N - s2 - i2)
                k2i = (a * s2 - b) * i2
                s3 = s + 0.5 * dt * k2s
                i3 = i + 0.5 * dt * k2i
                k3s = -a * s3 * i3 + c * (N - s3 - i3)
                k3i = (a * s3 - b) * i3
                s4 = s + dt * k3s
                i4 = i + dt * k3i
                k4s = -a * s4 * i4 + c * (N - s4 - i4)
                k4i = (a * s4 - b) * i4
                s = s + (dt / 6.0) * (k1s + 2.0 * k2s + 2.0 * k3s + k4s)
                i = i + (dt / 6.0) * (k1i + 2.0 * k2i + 2.0 * k3i + k4i)
                if s < 0.0:
                    if s < -tol:
                        bad[r] = 1
                    s = 0.0
                if i < 0.0:
                    if i < -tol:
                        bad[r] = 1
                    i = 0.0
                over = s + i - N
                if over > 0.0:
                    if over > tol:
                        bad[r] = 1
                    f = N / (s + i)
                    s = s * f
                    i = i * f
                svec[r] = s
                ivec[r] = i
        for r in range(n):
            out[r, j, 0] = svec[r]
            out[r, j, 1] = ivec[r]
        t_prev = marks[j]
    for r in range(n):
        if bad[r] == 1:
            return r
    return -1


def stay_sweep(a, b, c, N, starts, duration, h, tol, smin, eps0, kslope, knee, eps1, icap, mtol):
    """Flow each start for `duration`; fail if it ever leaves the curve-bounded region.

    Membership (with slack mtol): s >= smin, 0 <= i <= icap, s + i <= N, and
    i >= eps0*exp(-kslope*(s - smin)) left of the knee, i >= eps1 beyond it.
    """
    for r in range(starts.shape[0]):
        s = starts[r, 0]
        i = starts[r, 1]
        nfull = int(duration / h)
        rem = duration - nfull * h
        extra = 1 if rem > 1e-12 * h else 0
        for q in range(-1, nfull + extra):
            if q >= 0:
                dt = h if q < nfull else rem
                k1s = -a * s * i + c * (N - s - i)
                k1i = (a * s - b) * i
                s2 = s + 0.5 * dt * k1s
                i2 = i + 0.5 * dt * k1i
                k2s = -a * s2 * i2 + c * (N - s2 - i2)
                k2i = (a * s2 - b) * i2
                s3 = s + 0.5 * dt * k2s
                i3 = i + 0.5 * dt * k2i
                k3s = -a * s3 * i3 + c * (N - s3 - i3)
                k3i = (a * s3 - b) * i3
                s4 = s + dt * k3s
                i4 = i + dt * k3i
                k4s = -a * s4 * i4 + c * (N - s4 - i4)
                k4i = (a * s4 - b) * i4
                s = s + (dt / 6.0) * (k1s + 2.0 * k2s + 2.0 * k3s + k4s)
                i = i + (dt / 6.0) * (k1i + 2.0 * k2i + 2.0 * k3i + k4i)
                if s < 0.0:
                    if s < -tol:
                        return r
                    s = 0.0
                if i < 0.0:
                    if i < -tol:
                        return r
                    i = 0.0
                over = s + i - N
                if over > 0.0:
                    if over > tol:
                        return r
                    f = N / (s + i)
                    s = s * f
                    i = i * f
            floor = eps0 * math.exp(-kslope * (s - smin)) if s <= knee else eps1
            ok = (
                s >= smin - mtol
                and i >= -mtol
                and i <= icap + mtol
                and s + i <= N + mtol
                and i >= floor - mtol
            )
            if not ok:
                return r
    return -1
