"""
Worked Systems
Generators for the reference systems used by tests, docs and `subcert example`.
"""

from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from subcert.core.singular import Subspace, intersect, kernel
from subcert.core.symplectic import PhaseSpace, QuadraticForm, SystemOfForms
from subcert.errors import InputError


def _section_pair(n: int, j: int) -> List[QuadraticForm]:
    """q_j and q~_j for 1 <= j <= n-1."""
    base = [("x1*x1", 1.0), ("xi1*xi1", 1.0), ("xi1*xi1", 1j)]
    q = QuadraticForm.from_monomials(
        n, base + [(f"x{j + 1}*xi1", 1j)], name=f"q{j}", claimed_nonneg_real_part=True
    )
    q_tilde = QuadraticForm.from_monomials(
        n, base + [(f"xi{j + 1}*xi1", 1j)], name=f"q~{j}", claimed_nonneg_real_part=True
    )
    return [q, q_tilde]


def section_example(
    n: int,
    lambdas: Optional[Sequence[float]] = None,
    lambdas_tilde: Optional[Sequence[float]] = None,
) -> SystemOfForms:
    """
    The 2n-2 forms
        q_j  = x1^2 + xi1^2 + i(xi1^2 + x_{j+1} xi1)
        q~_j = x1^2 + xi1^2 + i(xi1^2 + xi_{j+1} xi1),   1 <= j <= n-1,
    ordered q_1..q_{n-1}, q~_1..q~_{n-1}. With lambdas given, only the forms
    with a positive weight are kept, each scaled by its weight.
    """
    if n < 2:
        raise InputError("The worked example needs n >= 2", kind="dimension")
    lambdas = [1.0] * (n - 1) if lambdas is None else list(lambdas)
    lambdas_tilde = [1.0] * (n - 1) if lambdas_tilde is None else list(lambdas_tilde)
    _check_weights(n, lambdas, lambdas_tilde)

    plain, tilde = [], []
    for j in range(1, n):
        q, q_tilde = _section_pair(n, j)
        if lambdas[j - 1] > 0:
            plain.append((q * lambdas[j - 1]).with_claim(name=q.name))
        if lambdas_tilde[j - 1] > 0:
            tilde.append((q_tilde * lambdas_tilde[j - 1]).with_claim(name=q_tilde.name))

    forms = plain + tilde
    return SystemOfForms(
        PhaseSpace(n),
        tuple(forms),
        tuple(q.name for q in forms),
        metadata={"example": "sec13", "n": n, "lambdas": lambdas, "lambdas_tilde": lambdas_tilde},
    )


def combined_form(
    n: int,
    lambdas: Optional[Sequence[float]] = None,
    lambdas_tilde: Optional[Sequence[float]] = None,
) -> QuadraticForm:
    """sum_j (lambda_j q_j + lambda~_j q~_j), a single form with a non-trivial singular space."""
    lambdas = [1.0] * (n - 1) if lambdas is None else list(lambdas)
    lambdas_tilde = [1.0] * (n - 1) if lambdas_tilde is None else list(lambdas_tilde)
    _check_weights(n, lambdas, lambdas_tilde)

    total = QuadraticForm.zero(PhaseSpace(n))
    for j in range(1, n):
        q, q_tilde = _section_pair(n, j)
        total = total + q * lambdas[j - 1] + q_tilde * lambdas_tilde[j - 1]
    return total.with_claim(name="q")


def _check_weights(n: int, lambdas: Sequence[float], lambdas_tilde: Sequence[float]) -> None:
    if len(lambdas) != n - 1 or len(lambdas_tilde) != n - 1:
        raise InputError(f"Expected {n - 1} weights of each kind", kind="dimension")
    if min(list(lambdas) + list(lambdas_tilde)) < 0:
        raise InputError("Weights must be non-negative", kind="range")
    if sum(lambdas) + sum(lambdas_tilde) <= 0:
        raise InputError("At least one weight must be positive", kind="range")


def worked_example_kernels(n: int, j: int, tilde: bool = False) -> Subspace:
    """
    Ker Re F ∩ Ker(Re F Im F) for q_j (or q~_j), j counted from 1.

    Expected: {x1 = xi1 = x_{j+1} = 0}, with xi_{j+1} in place of x_{j+1} for q~_j.
    """
    if not 1 <= j <= n - 1:
        raise InputError(f"j must lie in 1..{n - 1}", kind="range")
    q = _section_pair(n, j)[1 if tilde else 0]
    sys = SystemOfForms.of(q)
    re_f, im_f = sys.re_maps[0], sys.im_maps[0]
    return intersect([kernel(re_f, space=q.space), kernel(re_f @ im_f, space=q.space)])


# ── Named systems ────────────────────────────────────────────────────────────


def elliptic(n: int = 1) -> SystemOfForms:
    """(1+i)|X|^2, elliptic with k0 = 0."""
    space = PhaseSpace(n)
    q = QuadraticForm(space, (1 + 1j) * np.eye(space.dim), claimed_nonneg_real_part=True, name="q")
    return SystemOfForms(space, (q,), metadata={"example": "elliptic", "n": n})


def ladder(n: int = 1) -> SystemOfForms:
    """xi^2 + i x^2 in the first pair of variables, k0 = 1 when n = 1."""
    q = QuadraticForm.from_monomials(
        n, [("xi1*xi1", 1.0), ("x1*x1", 1j)], name="q", claimed_nonneg_real_part=True
    )
    return SystemOfForms(q.space, (q,), metadata={"example": "ladder", "n": n})


def degenerate(n: int = 2) -> SystemOfForms:
    """x1^2 + xi1^2 ignoring the remaining variables; the tower stalls."""
    if n < 2:
        raise InputError("The degenerate example needs n >= 2", kind="dimension")
    q = QuadraticForm.from_monomials(
        n, [("x1*x1", 1.0), ("xi1*xi1", 1.0)], name="q", claimed_nonneg_real_part=True
    )
    return SystemOfForms(q.space, (q,), metadata={"example": "degenerate", "n": n})


def chain(n: int = 2) -> SystemOfForms:
    """
    x1^2 + xi1^2 + i(xi1 x2 + ... + xi_{n-1} x_n + xi_n^2).

    The imaginary part feeds each coordinate pair into the previous one, so the
    tower loses one dimension per level and k0 = 2n - 2.
    """
    if n < 2:
        raise InputError("The chain example needs n >= 2", kind="dimension")
    terms = [("x1*x1", 1.0), ("xi1*xi1", 1.0), (f"xi{n}*xi{n}", 1j)]
    terms += [(f"xi{i}*x{i + 1}", 1j) for i in range(1, n)]
    q = QuadraticForm.from_monomials(n, terms, name="q", claimed_nonneg_real_part=True)
    return SystemOfForms(q.space, (q,), metadata={"example": "chain", "n": n})


EXAMPLES: Dict[str, Callable[..., SystemOfForms]] = {
    "sec13": section_example,
    "elliptic": elliptic,
    "ladder": ladder,
    "degenerate": degenerate,
    "chain": chain,
}


def build_example(name: str, n: Optional[int] = None, **kwargs) -> SystemOfForms:
    """Named system with an optional dimension."""
    if name not in EXAMPLES:
        raise InputError(f"Unknown example '{name}' (choose from {', '.join(EXAMPLES)})", kind="range")
    builder = EXAMPLES[name]
    if n is None:
        return builder(**kwargs) if name != "sec13" else builder(2, **kwargs)
    return builder(n, **kwargs)
