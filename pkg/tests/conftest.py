import json
import math

import numpy as np
import pytest

from COHERENCE.core.channels import validate_channel
from COHERENCE.core.counterexample import counterexample_state
from COHERENCE.core.hermitian import pure_state, validate_density
from COHERENCE.utils.matrix_io import matrix_to_json
from COHERENCE.utils.settings import Settings, configure

SQRT2 = math.sqrt(2.0)


@pytest.fixture(autouse=True)
def default_settings(monkeypatch):
    for name in ("COHERENCE_CONFIG", "COHERENCE_LOG", "COHERENCE_WORKERS"):
        monkeypatch.delenv(name, raising=False)
    configure(Settings())
    yield
    configure(None)


@pytest.fixture
def three_level_state():
    return counterexample_state()


@pytest.fixture
def plus_state():
    return pure_state([1.0, 1.0])


@pytest.fixture
def hadamard_ops():
    h = np.array([[1.0, 1.0], [1.0, -1.0]]) / SQRT2
    return [h]


@pytest.fixture
def write_json(tmp_path):
    def write(name, obj):
        path = tmp_path / name
        path.write_text(json.dumps(obj))
        return str(path)

    return write


@pytest.fixture
def write_matrix(write_json):
    def write(name, m):
        return write_json(name, matrix_to_json(m))

    return write


PHASE = 0.7


@pytest.fixture
def phase_measurement():
    u = np.exp(-1j * PHASE)
    k1 = np.array([[1.0, -u], [0.0, 0.0]]) / SQRT2
    k2 = np.array([[0.0, 0.0], [1.0, u]]) / SQRT2
    return validate_channel([k1, k2])


@pytest.fixture
def nearly_pure_qubit():
    def build(eps):
        psi = np.array([1.0, np.exp(1j * PHASE)]) / SQRT2
        return validate_density((1.0 - eps) * np.outer(psi, psi.conj()) + eps * np.eye(2) / 2)

    return build
