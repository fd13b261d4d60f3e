"""
Cutoffs
C-infinity plateau functions built from the exponential splice

    s(t) = e^{-1/t} / (e^{-1/t} + e^{-1/(1-t)}),  s = 0 for t <= 0, 1 for t >= 1.
"""

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.special import expit

from subcert.errors import InputError


def splice(t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """s(t) and s'(t)."""
    t = np.asarray(t, dtype=float)
    shape = t.shape
    t = t.reshape(-1)
    value = np.where(t >= 1.0, 1.0, 0.0)
    deriv = np.zeros_like(t)
    inside = (t > 0.0) & (t < 1.0)
    if np.any(inside):
        u = t[inside]
        s = expit(1.0 / (1.0 - u) - 1.0 / u)
        value[inside] = s
        deriv[inside] = s * (1.0 - s) * (1.0 / u**2 + 1.0 / (1.0 - u) ** 2)
    return value.reshape(shape), deriv.reshape(shape)


@dataclass(frozen=True)
class CutoffSpec:
    """Product of a rising splice on |x| in [rise] and a falling one on |x| in [fall]."""

    name: str
    rise: Optional[Tuple[float, float]] = None
    fall: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        for edge in (self.rise, self.fall):
            if edge is not None and not 0.0 <= edge[0] < edge[1]:
                raise InputError(f"Invalid transition {edge} for cutoff {self.name}", kind="range")
        if self.rise and self.fall and self.rise[1] > self.fall[0]:
            raise InputError(f"Cutoff {self.name} rises after it starts falling", kind="range")

    def __call__(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Value and derivative in x, vectorized; |x| = inf is allowed."""
        x = np.asarray(x, dtype=float)
        r = np.abs(x)
        finite = np.isfinite(r)
        sign = np.where(x < 0, -1.0, 1.0)

        value = np.ones_like(r)
        deriv = np.zeros_like(r)
        if self.rise is not None:
            a, b = self.rise
            up, dup = splice(np.where(finite, (r - a) / (b - a), 1.0))
            dup = dup / (b - a)
            deriv = deriv * up + value * dup
            value = value * up
        if self.fall is not None:
            c, d = self.fall
            s, ds = splice(np.where(finite, (r - c) / (d - c), 1.0))
            down, ddown = 1.0 - s, -ds / (d - c)
            deriv = deriv * down + value * ddown
            value = value * down
        return value, np.where(finite, deriv * sign, 0.0)

    def value(self, x: np.ndarray) -> np.ndarray:
        return self(x)[0]


PSI = CutoffSpec("psi", fall=(1.0, 2.0))
CHI = CutoffSpec("chi", rise=(0.5, 1.0), fall=(2.0, 3.0))
W1 = CutoffSpec("w", rise=(1.0, 2.0))
W2 = CutoffSpec("w2", rise=(0.5, 1.0))

CUTOFFS: Dict[str, CutoffSpec] = {
    "psi": PSI,
    "chi": CHI,
    "w": W1,
    "w1": W1,
    "w2": W2,
}


def cutoff_eval(kind: str, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Value in [0, 1] and analytic derivative of a named cutoff."""
    if kind not in CUTOFFS:
        raise InputError(f"Unknown cutoff '{kind}' (choose from {', '.join(sorted(CUTOFFS))})", kind="range")
    return CUTOFFS[kind](x)
