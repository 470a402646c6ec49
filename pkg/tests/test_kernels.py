import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hairsynth import (
    Kernel,
    KernelError,
    StreakKernelParams,
    identity_kernel,
    kernel_preview,
    make_streak_kernel,
    normalize_kernel,
)
from oracles import dist_point_to_segment

streak_params = st.builds(
    StreakKernelParams,
    size=st.sampled_from([3, 5, 7, 9, 13, 19, 31]),
    angle_deg=st.floats(min_value=-180.0, max_value=180.0),
    curvature=st.floats(min_value=-0.3, max_value=0.3),
    thickness=st.floats(min_value=0.5, max_value=4.0),
    falloff_sigma=st.floats(min_value=0.5, max_value=50.0),
    target_sum=st.just(1.0),
)


def test_kernel_type_invariants():
    with pytest.raises(KernelError):
        Kernel(np.ones((4, 4)))
    with pytest.raises(KernelError):
        Kernel(np.full((3, 3), 1.5))
    with pytest.raises(KernelError):
        Kernel(np.full((3, 3), -0.1))
    with pytest.raises(KernelError):
        Kernel(np.ones((3, 5)))


def test_horizontal_3x3_streak_is_uniform_middle_row():
    k = make_streak_kernel(
        StreakKernelParams(
            size=3, angle_deg=0.0, curvature=0.0, thickness=0.9, falloff_sigma=1e6
        )
    )
    expected = np.array([[0, 0, 0], [1 / 3, 1 / 3, 1 / 3], [0, 0, 0]])
    assert np.allclose(k.coeffs, expected, atol=1e-9)


def test_paper_sizes_build_valid_kernels():
    # 19x19 for short rough hair, 31x31 for smooth longer hair: the larger
    # grid must carry strictly more nonzero taps along the streak.
    short = make_streak_kernel(StreakKernelParams(size=19, falloff_sigma=19 / 4))
    long_ = make_streak_kernel(StreakKernelParams(size=31, falloff_sigma=31 / 4))
    assert abs(short.coeff_sum() - 1.0) < 1e-6
    assert abs(long_.coeff_sum() - 1.0) < 1e-6
    assert len(long_.taps()) > len(short.taps())


@settings(max_examples=60, deadline=None)
@given(streak_params)
def test_streak_sum_and_range_invariants(p):
    k = make_streak_kernel(p)
    assert abs(k.coeff_sum() - p.target_sum) <= 1e-6
    assert np.all(k.coeffs >= 0.0) and np.all(k.coeffs <= 1.0)


@settings(max_examples=40, deadline=None)
@given(streak_params)
def test_straight_streak_has_180_degree_symmetry(p):
    p = StreakKernelParams(
        size=p.size,
        angle_deg=p.angle_deg,
        curvature=0.0,
        thickness=p.thickness,
        falloff_sigma=p.falloff_sigma,
    )
    k = make_streak_kernel(p)
    assert np.allclose(k.coeffs, np.rot90(k.coeffs, 2), atol=1e-12)


@pytest.mark.parametrize("size", [5, 9, 19, 31])
@pytest.mark.parametrize("thickness", [1.0, 2.0, 3.0])
def test_angle_0_and_90_confinement(size, thickness):
    r = size // 2
    rows = int(math.ceil(thickness / 2.0))
    k0 = make_streak_kernel(
        StreakKernelParams(size=size, angle_deg=0.0, thickness=thickness)
    )
    ys, xs = np.nonzero(k0.coeffs)
    assert np.all(np.abs(ys - r) <= rows)
    k90 = make_streak_kernel(
        StreakKernelParams(size=size, angle_deg=90.0, thickness=thickness)
    )
    ys, xs = np.nonzero(k90.coeffs)
    assert np.all(np.abs(xs - r) <= rows)


@settings(max_examples=30, deadline=None)
@given(streak_params, st.sampled_from([2, 4, 6]))
def test_monotone_support_under_size_growth(p, grow):
    bigger = StreakKernelParams(
        size=p.size + grow,
        angle_deg=p.angle_deg,
        curvature=p.curvature,
        thickness=p.thickness,
        falloff_sigma=p.falloff_sigma,
    )
    small = make_streak_kernel(p)
    big = make_streak_kernel(bigger)
    r_small, r_big = p.size // 2, bigger.size // 2
    pad = r_big - r_small
    small_support = small.coeffs > 0
    big_support = big.coeffs[pad:-pad, pad:-pad] > 0
    assert np.all(big_support[small_support])


def test_curvature_sign_mirrors_the_arc():
    left = make_streak_kernel(StreakKernelParams(size=15, curvature=0.15))
    right = make_streak_kernel(StreakKernelParams(size=15, curvature=-0.15))
    assert np.allclose(left.coeffs, np.flipud(right.coeffs), atol=1e-12)
    assert not np.allclose(left.coeffs, right.coeffs)


def test_curved_kernel_departs_from_straight():
    straight = make_streak_kernel(StreakKernelParams(size=19, curvature=0.0))
    curved = make_streak_kernel(StreakKernelParams(size=19, curvature=0.12))
    assert not np.allclose(straight.coeffs, curved.coeffs)


def test_identity_kernel_sizes():
    assert identity_kernel(1).coeffs.tolist() == [[1.0]]
    k3 = identity_kernel(3)
    assert k3.coeffs[1, 1] == 1.0
    assert k3.coeff_sum() == 1.0
    assert np.count_nonzero(k3.coeffs) == 1
    with pytest.raises(KernelError):
        identity_kernel(4)


def test_normalize_uniform_3x3():
    k = normalize_kernel(Kernel(np.full((3, 3), 1.0)), 1.0)
    assert np.allclose(k.coeffs, 1 / 9)


def test_normalize_is_idempotent():
    k = make_streak_kernel(StreakKernelParams(size=9))
    again = normalize_kernel(k, 1.0)
    assert np.allclose(k.coeffs, again.coeffs, atol=1e-9)


def test_normalize_halves_a_sum_two_kernel():
    k = Kernel(np.full((3, 3), 2 / 9))
    half = normalize_kernel(k, 1.0)
    assert np.allclose(half.coeffs, k.coeffs / 2)


def test_normalize_rejects_zero_kernel():
    with pytest.raises(KernelError):
        normalize_kernel(Kernel(np.zeros((3, 3))), 1.0)


def test_preview_identity_kernel():
    img = kernel_preview(identity_kernel(3))
    assert img.width == 3 and img.height == 3
    assert np.array_equal(img.pixel(1, 1), [1.0, 0.0, 0.0, 1.0])  # red center
    assert np.array_equal(img.pixel(0, 0), [1.0, 1.0, 1.0, 1.0])  # white zero


def test_preview_uniform_kernel_is_full_red():
    img = kernel_preview(Kernel(np.full((3, 3), 1 / 9)))
    assert np.all(img.data[:, :, 0] == 1.0)
    assert np.all(img.data[:, :, 1] == 0.0)
    assert np.all(img.data[:, :, 2] == 0.0)


def test_preview_upscale_has_hard_cells():
    img = kernel_preview(identity_kernel(3), scale=4)
    assert img.width == 12 and img.height == 12
    assert np.all(img.data[4:8, 4:8, 1] == 0.0)  # whole center cell red
    assert np.all(img.data[0:4, 0:4, 1] == 1.0)


def test_streak_preview_matches_geometric_oracle():
    # Red cells of an angle-0 streak must be exactly the cells whose centers
    # lie within thickness/2 of the horizontal diameter segment.
    p = StreakKernelParams(size=11, angle_deg=0.0, curvature=0.0, thickness=2.0)
    img = kernel_preview(make_streak_kernel(p))
    r = p.size // 2
    for y in range(p.size):
        for x in range(p.size):
            d = dist_point_to_segment(x - r, y - r, -r, 0.0, r, 0.0)
            is_red = img.pixel(x, y)[1] < 1.0
            assert is_red == (d <= p.thickness / 2.0), (x, y)
