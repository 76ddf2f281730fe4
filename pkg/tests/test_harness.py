import pytest

from disputesim.errors import UnknownTheorem
from disputesim.harness import THEOREM_IDS, verify_all, verify_theorem


def test_all_theorems_pass_with_defaults():
    reports = verify_all()
    assert [r.theorem_id for r in reports] == list(THEOREM_IDS)
    for r in reports:
        failed = [c.name for c in r.checks if not c.passed]
        assert r.passed and r.verdict == "pass", (r.theorem_id, failed)
        kinds = {c.kind for c in r.checks}
        assert {"analytic", "simulation"} <= kinds, r.theorem_id


def test_unknown_theorem():
    with pytest.raises(UnknownTheorem):
        verify_theorem("bogus")


def test_trial_override_is_recorded():
    r = verify_theorem("UP_single", {"trials": 7})
    assert any(c.trials == 7 for c in r.checks)
