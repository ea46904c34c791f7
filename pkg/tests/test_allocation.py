import pytest

from shotlab.allocation import PolicyError, ShotPolicy, default_k, next_shots


def test_fixed_policy():
    policy = ShotPolicy("fixed", s_fixed=1024)
    for i in range(0, 500, 37):
        assert next_shots(policy, i, 3.0) == 1024


def test_linear_policy_examples():
    policy = ShotPolicy("linear")
    assert next_shots(policy, 0, 0.0) == 1000
    assert next_shots(policy, 98, 0.0) == 20
    assert next_shots(policy, 200, 0.0) == 20


def test_step_policy_example():
    policy = ShotPolicy("step")
    assert next_shots(policy, 15, 0.0) == 900
    assert next_shots(policy, 0, 0.0) == 1000
    assert next_shots(policy, 9, 0.0) == 1000
    assert next_shots(policy, 10, 0.0) == 900


def test_dds_examples():
    policy = ShotPolicy("dds", k=64.0).resolved(4)
    assert policy.cap == 1024
    assert next_shots(policy, 5, 2.0) == 256
    assert next_shots(policy, 5, 10.0) == 1024  # min(1024, 65536)


def test_dds_m_cap():
    policy = ShotPolicy("dds_m", k=64.0).resolved(4)
    assert policy.cap == 100_000
    assert next_shots(policy, 0, 10.0) == 65536
    assert next_shots(policy, 0, 12.0) == 100_000


def test_dds_rounding_half_up_and_floor_of_one():
    policy = ShotPolicy("dds", k=1.0, cap=1024)
    # k*2^H = 1.5 at H = log2(1.5): rounds up to 2
    assert next_shots(policy, 0, 0.5849625007211562) == 2
    assert next_shots(policy, 0, 0.0) == 1
    tiny = ShotPolicy("dds", k=0.01, cap=1024)
    assert next_shots(tiny, 0, 0.0) == 1  # never below one shot


def test_tiered_monotone_and_floored():
    for kind in ("linear", "step"):
        policy = ShotPolicy(kind)
        values = [next_shots(policy, i, 0.0) for i in range(300)]
        assert all(a >= b for a, b in zip(values, values[1:]))
        assert all(v >= policy.floor for v in values)


def test_step_matches_linear_at_decade_boundaries():
    linear, step = ShotPolicy("linear"), ShotPolicy("step")
    for i in range(0, 200, 10):
        assert next_shots(step, i, 0.0) == next_shots(linear, i, 0.0)


def test_dds_bounds_and_monotonicity_in_entropy():
    policy = ShotPolicy("dds", k=8.0, cap=1024)
    entropies = [h * 0.25 for h in range(0, 129)]  # [0, 32]
    values = [next_shots(policy, 0, h) for h in entropies]
    assert all(1 <= v <= 1024 for v in values)
    assert all(a <= b for a, b in zip(values, values[1:]))


def test_default_k_anchors():
    assert default_k(4) == 64.0
    assert default_k(8) == 8.0
    assert default_k(12) == 2.0


def test_default_k_interpolation_clamped():
    assert default_k(6) == pytest.approx(2.0**4.5)
    assert default_k(10) == pytest.approx(4.0)
    assert 1.0 <= default_k(16) <= 64.0
    assert default_k(2) == 64.0  # clamped high end
    assert default_k(20) == 1.0  # clamped low end
    with pytest.raises(PolicyError):
        default_k(0)


def test_policy_validation():
    with pytest.raises(PolicyError):
        ShotPolicy("bogus")
    with pytest.raises(PolicyError):
        ShotPolicy("dds", k=-1.0)
    with pytest.raises(PolicyError):
        ShotPolicy("fixed", s_fixed=0)
    with pytest.raises(PolicyError):
        ShotPolicy("linear", floor=0)
    with pytest.raises(PolicyError):
        next_shots(ShotPolicy("dds", k=2.0, cap=10), -1, 1.0)
    with pytest.raises(PolicyError):
        next_shots(ShotPolicy("dds", k=2.0, cap=10), 0, -1.0)


def test_unresolved_dds_rejected():
    with pytest.raises(PolicyError):
        next_shots(ShotPolicy("dds"), 0, 1.0)
