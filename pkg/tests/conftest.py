import pytest

from spin1bell.idmrg import DmrgConfig, idmrg_run
from spin1bell.mpo import xxz_d_hamiltonian_mpo


def _ground(jz, d, chi, **kw):
    return idmrg_run(xxz_d_hamiltonian_mpo(1.0, jz, d), DmrgConfig(chi_max=chi, **kw))


@pytest.fixture(scope="session")
def heisenberg30():
    """Isotropic chain (Haldane phase) at chi=30."""
    return _ground(1.0, 0.0, 30)


@pytest.fixture(scope="session")
def antiferro30():
    """Ising-like antiferromagnet J_z=2 (Neel phase) at chi=30."""
    return _ground(2.0, 0.0, 30)


@pytest.fixture(scope="session")
def xy20():
    """Critical XY1 phase, J_z=-0.5, at chi=20."""
    return _ground(-0.5, 0.0, 20, max_sweeps=600)
