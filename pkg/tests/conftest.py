import numpy as np
import pytest

from subcert.config import settings
from subcert.core.examples import chain, degenerate, elliptic, ladder, section_example
from subcert.core.symplectic import PhaseSpace, QuadraticForm, SystemOfForms


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    """Point the override file at an empty location so user config never leaks in."""
    path = tmp_path / "config.yaml"
    monkeypatch.setattr(settings, "CONFIG_FILE", str(path))
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def sec13():
    return section_example(2)


@pytest.fixture
def ladder_system():
    return ladder(1)


@pytest.fixture
def elliptic_system():
    return elliptic(1)


@pytest.fixture
def degenerate_system():
    return degenerate(2)


@pytest.fixture
def chain_system():
    return chain(2)


def random_system(seed: int, n: int = 2, N: int = 2, rank: int = 1) -> SystemOfForms:
    """N forms with low-rank PSD real parts and generic imaginary parts."""
    gen = np.random.default_rng(seed)
    space = PhaseSpace(n)
    forms = []
    for i in range(N):
        A = gen.standard_normal((space.dim, rank))
        B = gen.standard_normal((space.dim, space.dim))
        forms.append(
            QuadraticForm(space, A @ A.T + 1j * (B + B.T) / 2.0, claimed_nonneg_real_part=True, name=f"q{i + 1}")
        )
    return SystemOfForms(space, tuple(forms))
