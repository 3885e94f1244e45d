import numpy as np
import pytest

from lcalim.groups import (
    GroupElement,
    GroupId,
    from_int,
    from_turns,
    padic_group,
    solenoid_group,
    torus_group,
)


def random_element(group: GroupId, rng: np.random.Generator) -> GroupElement:
    if group.kind == "padic":
        return from_int(group, int(rng.integers(0, group.modulus)))
    return from_turns(group, float(rng.uniform(-0.5, 0.5)))


@pytest.fixture
def rng():
    return np.random.default_rng(991)


@pytest.fixture(params=["torus", "padic", "solenoid"])
def any_group(request):
    return {
        "torus": torus_group(),
        "padic": padic_group(2, 8),
        "solenoid": solenoid_group(2, 6),
    }[request.param]
