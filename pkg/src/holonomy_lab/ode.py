"""Dormand-Prince 5(4) integrator with PI step-size control.

Works on complex state vectors.  Output points are hit exactly by clipping
steps, so no dense output is needed.
"""

import numpy as np

from .errors import StepFailure

_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = _A[6]
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

SAFETY = 0.9
FAC_MIN = 0.2
FAC_MAX = 5.0
PI_BETA = 0.04
PI_ALPHA = 0.2 - 0.75 * PI_BETA


def integrate(rhs, t0, t1, y0, rtol=1e-10, atol=None, t_eval=None, h0=None, max_steps=200_000):
    """Integrate y' = rhs(t, y) from t0 to t1 (t1 > t0).

    Returns ``(ts, ys, stats)`` where ``ts``/``ys`` hold the initial point and
    either every accepted step or exactly the points of ``t_eval``.
    """
    if atol is None:
        atol = rtol
    y = np.array(y0, dtype=complex)
    t = float(t0)
    span = float(t1) - t
    if span <= 0:
        raise ValueError("integrate needs t1 > t0")
    targets = None if t_eval is None else [float(s) for s in t_eval if t0 < s <= t1]
    if targets is not None and (not targets or targets[-1] != t1):
        targets.append(float(t1))
    h = span * min(0.1, 0.5 * rtol ** 0.2) if h0 is None else float(h0)
    ts = [t]
    ys = [y.copy()]
    k1 = rhs(t, y)
    err_old = 1e-4
    n_acc = n_rej = 0
    nxt = 0
    while t < t1:
        if n_acc + n_rej > max_steps:
            raise StepFailure(f"step budget exhausted at t={t:.6g}")
        # next stop: an output point or the end of the span
        stop = targets[nxt] if targets is not None else t1
        step = min(h, stop - t)
        clipped = step < h
        if step <= 1e-14 * span:
            raise StepFailure(f"step size underflow at t={t:.6g}")
        ks = [k1]
        for i in range(1, 7):
            yi = y.copy()
            for j, a in enumerate(_A[i]):
                if a:
                    yi += step * a * ks[j]
            ks.append(rhs(t + _C[i] * step, yi))
        y_new = yi  # stage 7 is evaluated at the 5th-order solution (FSAL)
        err_vec = np.zeros_like(y)
        for e, k in zip(_E, ks):
            if e:
                err_vec += e * k
        err_vec *= step
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.sqrt(np.mean((np.abs(err_vec) / scale) ** 2)))
        if not np.isfinite(err):
            h = step * FAC_MIN
            n_rej += 1
            continue
        if err <= 1.0:
            t = stop if clipped or step == stop - t else t + step
            y = y_new
            k1 = ks[6]
            n_acc += 1
            err = max(err, 1e-10)
            fac = SAFETY * err ** (-PI_ALPHA) * err_old ** PI_BETA
            h_prop = step * min(FAC_MAX, max(FAC_MIN, fac))
            # a clipped step says nothing about how large h may grow
            h = max(h, h_prop) if clipped else h_prop
            err_old = err
            if targets is None:
                ts.append(t)
                ys.append(y.copy())
            elif t == targets[nxt]:
                ts.append(t)
                ys.append(y.copy())
                nxt += 1
        else:
            n_rej += 1
            h = step * max(FAC_MIN, SAFETY * err ** (-0.2))
    return np.array(ts), np.array(ys), {"accepted": n_acc, "rejected": n_rej}
