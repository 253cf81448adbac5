import pytest

from memsbpf.beam import CantileverBeam
from memsbpf.electrostatics import table1_actuator
from memsbpf.materials import reset_registry


@pytest.fixture
def table1():
    return table1_actuator()


@pytest.fixture
def resonator_beam():
    # 455 kHz design point with the width rounded to 10 um as fabricated
    return CantileverBeam(length=76.7e-6, width=10e-6, thickness=2e-6, gap=2e-6)


@pytest.fixture(autouse=True)
def _clean_registry():
    yield
    reset_registry()
