"""
Singular Space
Rank-revealing kernels, the kernel tower T_0 ⊇ T_1 ⊇ ..., the loss exponent
delta = 2k0/(2k0+1), positive definiteness of the summed Gram form and
partial ellipticity on the singular space.
"""

import hashlib
import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from subcert.config import section
from subcert.core.symplectic import (
    PhaseSpace,
    QuadraticForm,
    SystemOfForms,
    gram_matrices,
    hamilton_map,
    sphere_directions,
)
from subcert.errors import IndexOutOfRange, InputError

logger = logging.getLogger(__name__)

BORDERLINE_FACTOR = 100.0
ORTHONORMAL_TOL = 1e-12

VERDICT_SATISFIED = "satisfied"
VERDICT_NOT_SATISFIED = "not_satisfied_up_to_kmax"


def _rank_tol(tol: Optional[float]) -> float:
    return float(section("tolerances")["rank"]) if tol is None else float(tol)


# ── Subspaces ────────────────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class Subspace:
    """Real subspace of phase space given by an orthonormal column basis."""

    space: PhaseSpace
    basis: np.ndarray
    tol: float = 1e-10
    gap: Tuple[float, float] = (float("inf"), 0.0)

    def __post_init__(self):
        B = np.array(self.basis, dtype=float)
        if B.ndim == 1:
            B = B[:, None]
        if B.shape[0] != self.space.dim:
            raise InputError(f"Basis has {B.shape[0]} rows, phase space has {self.space.dim}", kind="dimension")
        if B.shape[1]:
            err = np.max(np.abs(B.T @ B - np.eye(B.shape[1])))
            if err > ORTHONORMAL_TOL * 10:
                B = linalg.orth(B) if np.linalg.matrix_rank(B) else B[:, :0]
        B.setflags(write=False)
        object.__setattr__(self, "basis", B)

    @classmethod
    def full(cls, space: PhaseSpace, tol: float = 1e-10) -> "Subspace":
        return cls(space, np.eye(space.dim), tol)

    @classmethod
    def zero(cls, space: PhaseSpace, tol: float = 1e-10) -> "Subspace":
        return cls(space, np.zeros((space.dim, 0)), tol)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def project(self, X: np.ndarray) -> np.ndarray:
        X = self.space.check(X)
        return X @ self.projector

    def contains(self, X: np.ndarray, tol: Optional[float] = None) -> bool:
        X = np.asarray(X, dtype=float)
        tol = self.tol if tol is None else tol
        norm = np.linalg.norm(X)
        return bool(np.linalg.norm(X - self.project(X)) <= tol * max(1.0, norm) * 10)

    def equals(self, other: "Subspace", tol: Optional[float] = None) -> bool:
        tol = max(self.tol, other.tol) if tol is None else tol
        if self.dim != other.dim:
            return False
        return subspace_distance(self, other) <= max(1e-8, tol * 100)

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, n={self.space.n})"


def subspace_distance(U: Subspace, V: Subspace) -> float:
    """Spectral norm of the difference of orthogonal projectors."""
    if U.space != V.space:
        raise InputError("Subspaces live on different phase spaces", kind="dimension")
    D = U.projector - V.projector
    return float(np.linalg.norm(D, 2)) if D.any() else 0.0


def _as_real_rows(A: np.ndarray) -> np.ndarray:
    A = np.atleast_2d(np.asarray(A))
    if np.iscomplexobj(A):
        return np.vstack([A.real, A.imag])
    return A.astype(float)


def kernel(
    A: np.ndarray,
    tol: Optional[float] = None,
    scale: Optional[float] = None,
    space: Optional[PhaseSpace] = None,
) -> Subspace:
    """
    Real null space of A by singular-value thresholding.

    Singular values below tol * max(sigma_max, scale) count as zero. Complex A
    yields the real vectors annihilated by both its real and imaginary parts.
    """
    tol = _rank_tol(tol)
    R = _as_real_rows(A)
    cols = R.shape[1]
    if cols % 2:
        raise InputError(f"Matrix has {cols} columns, phase space needs an even count", kind="dimension")
    space = space or PhaseSpace(cols // 2)
    if space.dim != cols:
        raise InputError(f"Matrix has {cols} columns, phase space has {space.dim}", kind="dimension")

    if R.shape[0] == 0 or not R.any():
        return Subspace(space, np.eye(cols), tol)

    _, s, Vh = linalg.svd(R, full_matrices=True)
    reference = max(float(s[0]), float(scale or 0.0))
    threshold = tol * reference
    rank = int(np.sum(s > threshold))

    kept = float(s[rank - 1]) if rank else float("inf")
    dropped = float(s[rank]) if rank < len(s) else 0.0
    borderline = s[(s > threshold / BORDERLINE_FACTOR) & (s < threshold * BORDERLINE_FACTOR)]
    if borderline.size:
        logger.warning(
            "Borderline rank decision: singular values %s within %gx of threshold %.3e",
            np.array2string(borderline, precision=3), BORDERLINE_FACTOR, threshold,
        )

    return Subspace(space, Vh[rank:].T.copy(), tol, gap=(kept, dropped))


def intersect(subspaces: Sequence[Subspace], tol: Optional[float] = None) -> Subspace:
    """Intersection of subspaces as the kernel of the stacked complementary projectors."""
    if not subspaces:
        raise InputError("intersect needs at least one subspace", kind="dimension")
    space = subspaces[0].space
    if any(V.space != space for V in subspaces):
        raise InputError("Subspaces live on different phase spaces", kind="dimension")
    tol = _rank_tol(tol) if tol is None else tol
    if any(V.dim == 0 for V in subspaces):
        return Subspace.zero(space, tol)
    I = np.eye(space.dim)
    stacked = np.vstack([I - V.projector for V in subspaces])
    return kernel(stacked, tol, scale=1.0, space=space)


def preimage(A: np.ndarray, V: Subspace, tol: Optional[float] = None) -> Subspace:
    """{X : A X ∈ V}, decided on A normalized to unit norm."""
    A = np.asarray(A)
    tol = _rank_tol(tol)
    scale = float(np.linalg.norm(A, 2)) if A.any() else 1.0
    complement = np.eye(V.space.dim) - V.projector
    return kernel(complement @ (A / scale), tol, scale=1.0, space=V.space)


# ── Scalar singular space ────────────────────────────────────────────────────


def _scalar_kernels(q: QuadraticForm, upto: int) -> List[np.ndarray]:
    """Re F (Im F)^j for j <= upto, with F divided by ||Q|| so every block is O(1)."""
    F = hamilton_map(q)
    unit = q.norm or 1.0
    re_f, im_f = F.re_part / unit, F.im_part / unit
    blocks, P = [], np.eye(q.space.dim)
    for _ in range(upto + 1):
        blocks.append(re_f @ P)
        P = P @ im_f
    return blocks


def _unit_maps(sys: SystemOfForms) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    """Re F_j and Im F_j divided by the system scale."""
    unit = sys.scale or 1.0
    return [F / unit for F in sys.re_maps], [F / unit for F in sys.im_maps]


def singular_space(q: QuadraticForm, tol: Optional[float] = None) -> Subspace:
    """S = ∩_{j<2n} Ker[Re F (Im F)^j] ∩ R^2n."""
    if not q.claimed_nonneg_real_part:
        logger.warning("singular_space called on '%s' without a non-negative real part claim", q.name or "q")
    tol = _rank_tol(tol)
    blocks = _scalar_kernels(q, 2 * q.n - 1)
    return kernel(np.vstack(blocks), tol, scale=1.0, space=q.space)


def scalar_k0(q: QuadraticForm, tol: Optional[float] = None) -> Optional[int]:
    """Smallest k with ∩_{j<=k} Ker[Re F (Im F)^j] = {0}, or None when S ≠ {0}."""
    tol = _rank_tol(tol)
    blocks = _scalar_kernels(q, 2 * q.n - 1)
    for k in range(len(blocks)):
        V = kernel(np.vstack(blocks[: k + 1]), tol, scale=1.0, space=q.space)
        if V.dim == 0:
            return k
    return None


def word_kernel(sys: SystemOfForms, j: int, word: Sequence[int], tol: Optional[float] = None) -> Subspace:
    """Ker(Re F_j Im F_l1 ... Im F_lk)."""
    sys.index(j)
    re_maps, im_maps = _unit_maps(sys)
    A = re_maps[j]
    for pos, l in enumerate(word):
        sys.index(l, what=f"word entry {pos}")
        A = A @ im_maps[l]
    return kernel(A, _rank_tol(tol), scale=1.0, space=sys.space)


# ── Kernel tower ─────────────────────────────────────────────────────────────


@dataclass
class KernelTower:
    """Nested kernels T_0 ⊇ T_1 ⊇ ... with the first level of dimension zero."""

    levels: List[Subspace]
    k0: Optional[int] = None
    delta: Optional[Fraction] = None
    stabilized: bool = False

    @property
    def dims(self) -> List[int]:
        return [V.dim for V in self.levels]

    @property
    def satisfied(self) -> bool:
        return self.k0 is not None

    @property
    def gaps(self) -> List[Tuple[float, float]]:
        return [V.gap for V in self.levels]


@dataclass
class Certificate:
    """Serializable outcome of a tower computation."""

    system_hash: str
    n: int
    N: int
    k0: Optional[int]
    delta: Optional[Fraction]
    dims: List[int]
    min_eigenvalue: float
    tolerances: Dict[str, float]
    verdict: str
    gaps: List[Tuple[float, float]] = field(default_factory=list)
    stabilized: bool = False

    def to_dict(self) -> Dict[str, Any]:
        def finite(x: float) -> Optional[float]:
            return float(x) if np.isfinite(x) else None

        return {
            "system_hash": self.system_hash,
            "n": self.n,
            "N": self.N,
            "k0": self.k0,
            "delta": None if self.delta is None else str(self.delta),
            "delta_float": None if self.delta is None else float(self.delta),
            "tower_dims": list(self.dims),
            "min_eigenvalue": float(self.min_eigenvalue),
            "tolerances": dict(self.tolerances),
            "verdict": self.verdict,
            "stabilized": self.stabilized,
            "singular_value_gaps": [[finite(a), finite(b)] for a, b in self.gaps],
        }


def system_fingerprint(sys: SystemOfForms) -> str:
    """SHA-256 of the canonical coefficient JSON of a system."""
    payload = {
        "n": sys.n,
        "forms": [
            {
                "name": name,
                "re": [[float(v) for v in row] for row in q.re],
                "im": [[float(v) for v in row] for row in q.im],
            }
            for name, q in zip(sys.names, sys.forms)
        ],
    }
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def loss_exponent(k0: int) -> Fraction:
    """delta = 2k0 / (2k0 + 1)."""
    return Fraction(2 * k0, 2 * k0 + 1)


def system_tower(
    sys: SystemOfForms, kmax: Optional[int] = None, tol: Optional[float] = None
) -> Tuple[KernelTower, Certificate]:
    """
    T_0 = ∩_j Ker Re F_j and T_k = T_0 ∩ ∩_l (Im F_l)^{-1}(T_{k-1}).

    Stops at the first level of dimension zero or at a fixed point.
    """
    tol = _rank_tol(tol)
    if kmax is None:
        kmax = section("tower").get("kmax") or 2 * sys.n
    if kmax < 0:
        raise IndexOutOfRange(f"kmax must be >= 0, got {kmax}")

    re_maps, im_maps = _unit_maps(sys)
    space = sys.space
    T0 = kernel(np.vstack(re_maps), tol, scale=1.0, space=space)
    levels = [T0]
    logger.debug("tower level 0: dim %d, gap %s", T0.dim, T0.gap)

    k0 = 0 if T0.dim == 0 else None
    stabilized = False
    complement0 = np.eye(space.dim) - T0.projector
    for k in range(1, kmax + 1):
        if k0 is not None:
            break
        prev = levels[-1]
        complement = np.eye(space.dim) - prev.projector
        stacked = np.vstack([complement0] + [complement @ F for F in im_maps])
        Tk = kernel(stacked, tol, scale=1.0, space=space)
        levels.append(Tk)
        logger.debug("tower level %d: dim %d, gap %s", k, Tk.dim, Tk.gap)
        if Tk.dim == 0:
            k0 = k
        elif Tk.dim == prev.dim:
            stabilized = True
            break

    tower = KernelTower(
        levels=levels,
        k0=k0,
        delta=None if k0 is None else loss_exponent(k0),
        stabilized=stabilized,
    )

    check_level = k0 if k0 is not None else len(levels) - 1
    certificate = Certificate(
        system_hash=system_fingerprint(sys),
        n=sys.n,
        N=sys.N,
        k0=k0,
        delta=tower.delta,
        dims=tower.dims,
        min_eigenvalue=positive_definiteness_check(sys, check_level),
        tolerances={"rank": tol, "kmax": float(kmax)},
        verdict=VERDICT_SATISFIED if k0 is not None else VERDICT_NOT_SATISFIED,
        gaps=tower.gaps,
        stabilized=stabilized,
    )
    if k0 is None:
        logger.info("tower did not reach {0} (dims %s, stabilized=%s)", tower.dims, stabilized)
    return tower, certificate


def positive_definiteness_check(sys: SystemOfForms, k0: int) -> float:
    """Smallest eigenvalue of G_0 + ... + G_k0."""
    if k0 < 0:
        raise IndexOutOfRange(f"k0 must be >= 0, got {k0}")
    total = sum(gram_matrices(sys, k0))
    total = (total + total.T) / 2.0
    return float(linalg.eigvalsh(total, subset_by_index=[0, 0])[0])


# ── Partial ellipticity ──────────────────────────────────────────────────────


@dataclass
class PartialEllipticity:
    """Minimum of |q| on the unit sphere of a subspace, with its decision."""

    elliptic: bool
    min_abs: float
    witness: Optional[np.ndarray]
    heuristic: bool
    method: str
    subspace_dim: int

    def __bool__(self) -> bool:
        return self.elliptic

    def to_dict(self) -> Dict[str, Any]:
        return {
            "elliptic": self.elliptic,
            "min_abs": self.min_abs,
            "heuristic": self.heuristic,
            "method": self.method,
            "subspace_dim": self.subspace_dim,
            "witness": None if self.witness is None else [float(v) for v in self.witness],
        }


def _imaginary_definiteness(K_im: np.ndarray) -> Tuple[float, np.ndarray]:
    """min |u^T B u| over unit u for real symmetric B, with a minimizer."""
    lam, vecs = np.linalg.eigh(K_im)
    lo, hi = lam[0], lam[-1]
    if lo > 0:
        return float(lo), vecs[:, 0]
    if hi < 0:
        return float(-hi), vecs[:, -1]
    if hi - lo <= 0:
        return 0.0, vecs[:, 0]
    a, b = np.sqrt(hi / (hi - lo)), np.sqrt(-lo / (hi - lo))
    return 0.0, a * vecs[:, 0] + b * vecs[:, -1]


def _descent(K: np.ndarray, starts: np.ndarray, steps: int, floor: float) -> Tuple[float, np.ndarray, bool]:
    """Projected gradient descent of |u^T K u|^2 on the unit sphere with backtracking."""
    normK = max(float(np.linalg.norm(K, 2)), 1e-300)
    best_val, best_u, converged = np.inf, starts[0], False

    for u in starts:
        u = u / np.linalg.norm(u)
        z = u @ K @ u
        f = abs(z) ** 2
        done = False
        for _ in range(steps):
            g = 4.0 * np.real(np.conj(z) * (K @ u))
            g = g - (g @ u) * u
            if np.linalg.norm(g) <= 1e-12 * normK**2 or np.sqrt(f) <= floor:
                done = True
                break
            eta = 1.0 / normK**2
            improved = False
            for _ in range(40):
                trial = u - eta * g
                trial /= np.linalg.norm(trial)
                zt = trial @ K @ trial
                if abs(zt) ** 2 < f:
                    u, z, f = trial, zt, abs(zt) ** 2
                    improved = True
                    break
                eta /= 2.0
            if not improved:
                done = True
                break
        if np.sqrt(f) < best_val:
            best_val, best_u, converged = float(np.sqrt(f)), u, done
    return best_val, best_u, converged


def partial_ellipticity(
    q: QuadraticForm,
    subspace: Optional[Subspace] = None,
    tol: Optional[float] = None,
    samples_per_dim2: Optional[int] = None,
    descent_steps: Optional[int] = None,
    seed: Optional[int] = None,
) -> PartialEllipticity:
    """
    Whether q(X) = 0 with X in the singular space forces X = 0.

    On the singular space Re q vanishes identically, so the decision reduces to
    definiteness of Im q restricted there. For a subspace on which Re q does not
    vanish, dense sphere sampling plus projected descent is used and flagged
    heuristic when the descent has not converged.
    """
    cfg = section("ellipticity")
    tol = _rank_tol(tol)
    samples_per_dim2 = samples_per_dim2 or int(cfg["samples_per_dim2"])
    descent_steps = descent_steps or int(cfg["descent_steps"])
    seed = int(section("sampling")["seed"]) if seed is None else seed

    S = singular_space(q, tol) if subspace is None else subspace
    d = S.dim
    if d == 0:
        return PartialEllipticity(True, float("inf"), None, False, "trivial", 0)

    B = S.basis
    K = B.T @ q.matrix @ B
    threshold = tol * (q.norm or 1.0)

    if np.max(np.abs(K.real)) <= threshold:
        value, u = _imaginary_definiteness((K.imag + K.imag.T) / 2.0)
        return PartialEllipticity(value > threshold, value, B @ u, False, "restricted_imaginary_part", d)

    count = max(10 * d * d, 2 * d)
    U = sphere_directions(d, count, seed)
    U = np.vstack([U, -np.eye(d)])
    values = np.abs(np.einsum("si,ij,sj->s", U, K, U))
    order = np.argsort(values)[:3]
    value, u, converged = _descent(K, U[order], descent_steps, threshold)
    value = min(value, float(values[order[0]]))
    if not converged:
        logger.warning("partial ellipticity descent did not converge (min |q| = %.3e)", value)
    return PartialEllipticity(value > threshold, value, B @ u, not converged, "sampled_descent", d)


# ── One-call certification ───────────────────────────────────────────────────


@dataclass
class Certification:
    """Tower, certificate and the scalar analysis of the summed form."""

    tower: KernelTower
    certificate: Certificate
    sum_singular_dim: int
    sum_scalar_k0: Optional[int]
    sum_partial_ellipticity: PartialEllipticity

    def to_dict(self) -> Dict[str, Any]:
        data = self.certificate.to_dict()
        data["sum_form"] = {
            "singular_space_dim": self.sum_singular_dim,
            "scalar_k0": self.sum_scalar_k0,
            "partial_ellipticity": self.sum_partial_ellipticity.to_dict(),
        }
        return data


def certify(
    sys: SystemOfForms,
    kmax: Optional[int] = None,
    tol: Optional[float] = None,
    seed: Optional[int] = None,
) -> Certification:
    """Run the tower and the scalar singular-space analysis of sum_j q_j.

    seed drives the sampled fallback of the partial ellipticity test.
    """
    tower, certificate = system_tower(sys, kmax=kmax, tol=tol)
    total = sys.sum_form()
    S = singular_space(total, tol)
    return Certification(
        tower=tower,
        certificate=certificate,
        sum_singular_dim=S.dim,
        sum_scalar_k0=scalar_k0(total, tol),
        sum_partial_ellipticity=partial_ellipticity(total, S, tol=tol, seed=seed),
    )
