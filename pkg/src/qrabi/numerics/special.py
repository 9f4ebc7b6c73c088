"""Special functions not covered directly elsewhere."""

from __future__ import annotations

import numpy as np
from scipy import special

__all__ = ["reciprocal_gamma"]


def reciprocal_gamma(z):
    """1/Gamma(z), entire; exactly zero at the poles z = 0, -1, -2, ...

    Real input goes through :func:`scipy.special.rgamma`; complex input uses
    ``exp(-loggamma(z))`` which is accurate off the negative real axis and
    falls back to the reflection formula in the left half plane.
    """
    z = np.asarray(z)
    if not np.iscomplexobj(z):
        out = special.rgamma(z.astype(float))
        return out if out.ndim else float(out)
    z = z.astype(complex)
    out = np.empty_like(z)
    left = z.real < 0.5
    zr = z[~left]
    out[~left] = np.exp(-special.loggamma(zr))
    zl = z[left]
    # 1/Gamma(z) = Gamma(1 - z) sin(pi z) / pi
    out[left] = np.exp(special.loggamma(1.0 - zl)) * np.sin(np.pi * zl) / np.pi
    return out if out.ndim else complex(out)
