import math

import pytest

from skewforce import MachineGeometry


@pytest.fixture
def geom():
    """8-pole, 48-slot machine with placeholder dimensions."""
    return MachineGeometry(pole_count=8, slot_count=48, airgap_radius=0.05, rotor_radius=0.0495,
                           axial_length=0.1, rotor_diameter=0.099, slot_bottom_radius=0.07)


@pytest.fixture
def geom2p():
    return MachineGeometry(pole_count=2, slot_count=48, airgap_radius=0.05, rotor_radius=0.049,
                           axial_length=0.1, slot_bottom_radius=0.06)


DEG = math.pi / 180


_ACCEPTANCE = []


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)
