"""Vectorized adaptive quadrature over per-node integration windows."""

import numpy as np
from scipy.integrate import quad_vec


def integrate_windows(func, lo, hi, config, log_scale=False):
    """Integrate ``func`` over ``[lo[j], hi[j]]`` for every node ``j`` at once.

    ``func(y)`` receives an array with one abscissa per node and returns an
    array whose leading axis indexes nodes.  The windows are mapped onto
    ``[0, 1]`` so a single adaptive Gauss-Kronrod run covers all nodes.  With
    ``log_scale`` the windows bound ``log y`` instead of ``y``.

    Returns:
        ``(values, abserr, ok)`` where ``ok`` is false if the error estimate
        exceeds ``config.abs_tolerance`` or the subdivision cap was hit.
    """
    lo = np.asarray(lo, dtype=float)
    width = np.asarray(hi, dtype=float) - lo

    def mapped(t):
        v = lo + t * width
        if log_scale:
            y = np.exp(v)
            jac = width * y
        else:
            y = v
            jac = width
        out = func(y)
        return out * jac.reshape(jac.shape + (1,) * (out.ndim - 1))

    values, abserr, info = quad_vec(
        mapped, 0.0, 1.0,
        epsabs=config.abs_tolerance,
        epsrel=1e-12,
        norm="max",
        limit=config.max_subdivisions,
        full_output=True,
    )
    ok = info.status == 0 and abserr <= config.abs_tolerance
    return values, float(abserr), bool(ok)
