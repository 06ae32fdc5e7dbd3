import os
import sys
from pathlib import Path

import hypothesis
import numpy as np
import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from liouville_search.spin_core import SpinSystem  # noqa: E402

hypothesis.settings.register_profile("default", max_examples=40, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=300, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@st.composite
def spin_systems(draw, min_spins=1, max_spins=4, hz=1500.0):
    n = draw(st.integers(min_spins, max_spins))
    val = st.floats(-hz, hz, allow_nan=False, allow_infinity=False)
    shifts = [draw(val) for _ in range(n)]
    dip = np.zeros((n, n))
    sca = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            dip[i, j] = dip[j, i] = draw(val)
            sca[i, j] = sca[j, i] = draw(st.floats(-20, 20))
    return SpinSystem(shifts, dip, sca)


@pytest.fixture(scope="session")
def missing_pair_instance():
    from liouville_search.instances import missing_pair_instance

    return missing_pair_instance()


@pytest.fixture(scope="session")
def random_instances():
    from liouville_search.instances import random_labeled_instances

    return {3: random_labeled_instances(3, 50, seed=11), 4: random_labeled_instances(4, 20, seed=12)}


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        ok, detail = results[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})")
