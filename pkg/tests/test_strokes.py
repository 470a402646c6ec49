import math

import numpy as np
import pytest

from hairsynth import (
    Color,
    DegeneratePolygonError,
    HairPatch,
    HairStroke,
    Image,
    StrokeParams,
    draw_patch,
    generate_strokes,
    mean_intensity,
    polygon_area,
    rasterize_stroke,
)
from hairsynth.strokes import strokes_to_json
from oracles import (
    dist_point_to_segment,
    pnp_crossing_number,
    shoelace_area,
    supersampled_coverage,
)

WHITE = Color(1.0, 1.0, 1.0)
BLACK = Color(0.0, 0.0, 0.0)


def white_image(w=64, h=64):
    return Image.new(w, h, WHITE)


def patch_with(polygon, **stroke_kwargs):
    return HairPatch(
        polygon=tuple(polygon), stroke_params=StrokeParams(**stroke_kwargs)
    )


# --- polygon_area -------------------------------------------------------


def test_unit_square_area():
    assert polygon_area([(0, 0), (1, 0), (1, 1), (0, 1)]) == 1.0


def test_reversed_winding_same_area():
    assert polygon_area([(0, 1), (1, 1), (1, 0), (0, 0)]) == 1.0


def test_triangle_area():
    assert polygon_area([(0, 0), (4, 0), (0, 3)]) == 6.0


def test_degenerate_polygons_rejected():
    with pytest.raises(DegeneratePolygonError):
        polygon_area([(0, 0), (1, 1)])
    with pytest.raises(DegeneratePolygonError):
        polygon_area([(0, 0), (1, 1), (2, 2)])


# --- generate_strokes ---------------------------------------------------


def test_density_zero_gives_no_strokes():
    patch = patch_with([(0, 0), (30, 0), (30, 30), (0, 30)], density=0.0)
    assert generate_strokes(patch, seed=1) == []


def test_same_patch_and_seed_identical_strokes():
    patch = patch_with([(2, 2), (40, 5), (38, 44), (4, 40)], density=8.0)
    a = generate_strokes(patch, seed=123)
    b = generate_strokes(patch, seed=123)
    assert a == b
    assert strokes_to_json(a) == strokes_to_json(b)


def test_different_seed_changes_strokes():
    patch = patch_with([(2, 2), (40, 5), (38, 44), (4, 40)], density=8.0)
    assert strokes_to_json(generate_strokes(patch, 1)) != strokes_to_json(
        generate_strokes(patch, 2)
    )


def test_count_law_and_roots_inside_on_rectangle():
    # 50x40 rectangle: area 2000, density 5 -> exactly 10 strokes
    poly = [(0, 0), (50, 0), (50, 40), (0, 40)]
    patch = patch_with(poly, density=5.0)
    strokes = generate_strokes(patch, seed=9)
    assert len(strokes) == 10
    for s in strokes:
        root = s.spine[0]
        assert pnp_crossing_number(root[0], root[1], poly)


def test_count_law_on_random_polygons():
    from conftest import random_star_polygon

    rng = np.random.default_rng(31)
    for _ in range(50):
        poly = random_star_polygon(rng)
        density = float(rng.uniform(0, 12))
        patch = patch_with(poly, density=density)
        expected = int(math.floor(density * shoelace_area(poly) / 1000.0 + 0.5))
        assert len(generate_strokes(patch, seed=5)) == expected


def test_stroke_fields_respect_parameter_ranges():
    patch = patch_with(
        [(0, 0), (60, 0), (60, 60), (0, 60)],
        density=10.0,
        length_range=(10.0, 20.0),
        width_range=(1.0, 3.0),
        color_jitter=0.1,
    )
    for s in generate_strokes(patch, seed=77):
        assert 1.0 <= s.base_width <= 3.0
        assert s.tip_width <= s.base_width
        assert 0.0 <= min(s.color.r, s.color.g, s.color.b)
        assert max(s.color.r, s.color.g, s.color.b) <= 1.0
        # spine length never exceeds the drawn target range maximum
        arc = sum(
            math.dist(s.spine[i], s.spine[i + 1]) for i in range(len(s.spine) - 1)
        )
        assert arc <= 20.0 + 2 * patch.stroke_params.waviness_amp + 1e-6


def test_hairstroke_invariants():
    with pytest.raises(ValueError):
        HairStroke(((0, 0),), 1.0, 0.5, BLACK, 1.0)
    with pytest.raises(ValueError):
        HairStroke(((0, 0), (1, 1)), 1.0, 2.0, BLACK, 1.0)  # tip > base
    with pytest.raises(ValueError):
        HairStroke(((0, 0), (1, 1)), 0.0, 0.0, BLACK, 1.0)


# --- rasterize_stroke ---------------------------------------------------


def test_zero_opacity_stroke_changes_nothing():
    img = white_image(16, 16)
    stroke = HairStroke(((2.0, 8.0), (14.0, 8.0)), 2.0, 2.0, BLACK, opacity=0.0)
    out = rasterize_stroke(img, stroke)
    assert np.array_equal(out.data, img.data)


def test_centerline_pixel_fully_covered():
    img = white_image(16, 16)
    stroke = HairStroke(((2.0, 8.5), (14.0, 8.5)), 2.0, 2.0, BLACK, opacity=1.0)
    out = rasterize_stroke(img, stroke)
    # row 8 has centers at y=8.5, exactly on the spine
    assert np.allclose(out.data[8, 8, :3], 0.0)


def test_pixels_beyond_support_untouched():
    img = white_image(16, 16)
    stroke = HairStroke(((2.0, 8.5), (14.0, 8.5)), 2.0, 2.0, BLACK, opacity=1.0)
    out = rasterize_stroke(img, stroke)
    assert np.array_equal(out.data[:5], img.data[:5])
    assert np.array_equal(out.data[12:], img.data[12:])


def test_out_of_bounds_spine_clips_silently():
    img = white_image(8, 8)
    stroke = HairStroke(((-10.0, 4.0), (20.0, 4.0)), 2.0, 2.0, BLACK, 1.0)
    out = rasterize_stroke(img, stroke)  # must not raise
    assert out.data.min() < 1.0  # something was drawn inside


def test_cross_section_weight_matches_width_and_oracle():
    img = white_image(32, 32)
    for width in (1.0, 2.0, 3.5):
        spine = ((4.0, 16.5), (28.0, 16.5))
        stroke = HairStroke(spine, width, width, BLACK, opacity=1.0)
        out = rasterize_stroke(img, stroke)
        x = 16
        coverage = 1.0 - out.data[:, x, 0]  # black on white: alpha = 1 - R
        total = float(coverage.sum())
        assert abs(total - width) <= 0.5, width
        oracle_total = sum(
            supersampled_coverage(list(spine), width, width, x, y)
            for y in range(10, 24)
        )
        assert abs(total - oracle_total) <= 0.5, width


# --- draw_patch ---------------------------------------------------------


def test_draw_patch_density_zero_unchanged():
    img = white_image()
    patch = patch_with([(5, 5), (40, 5), (40, 40), (5, 40)], density=0.0)
    out = draw_patch(img, patch, seed=3)
    assert np.array_equal(out.data, img.data)


def test_draw_patch_deterministic():
    img = white_image()
    patch = patch_with([(5, 5), (40, 5), (40, 40), (5, 40)], density=10.0)
    a = draw_patch(img, patch, seed=11)
    b = draw_patch(img, patch, seed=11)
    assert np.array_equal(a.data, b.data)


def test_mean_intensity_monotone_in_density():
    poly = [(8, 8), (56, 8), (56, 56), (8, 56)]
    from hairsynth import rasterize_polygon

    bits = rasterize_polygon(poly, 64, 64).bits
    means = []
    for density in (1.0, 5.0, 25.0):
        patch = patch_with(
            poly, density=density, color_jitter=0.0, direction_deg=90.0
        )
        out = draw_patch(white_image(), patch, seed=21)
        means.append(float(mean_intensity(out, bits)[:3].mean()))
    # dark strokes on white: more strokes, darker interior
    assert means[0] > means[1] > means[2]


def test_draw_patch_locality_bound():
    poly = [(20, 12), (52, 16), (48, 52), (16, 48)]
    sp = StrokeParams(density=20.0, width_range=(1.0, 3.0), waviness_amp=2.0)
    patch = HairPatch(polygon=tuple(poly), stroke_params=sp)
    img = white_image()
    out = draw_patch(img, patch, seed=8)
    bound = sp.width_range[1] + sp.waviness_amp + 1.0
    diff = np.any(out.data != img.data, axis=2)
    n = len(poly)
    for y, x in zip(*np.nonzero(diff)):
        cx, cy = x + 0.5, y + 0.5
        if pnp_crossing_number(cx, cy, poly):
            continue
        d = min(
            dist_point_to_segment(
                cx, cy, poly[i][0], poly[i][1], poly[(i + 1) % n][0], poly[(i + 1) % n][1]
            )
            for i in range(n)
        )
        assert d <= bound, (x, y, d)
