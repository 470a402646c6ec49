import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))


def random_star_polygon(rng, cx=40.0, cy=40.0, n=None, rmin=5.0, rmax=25.0):
    """Simple-by-construction polygon: stratified angles around a center
    keep every angular gap below 180 degrees, so the polygon is star-shaped."""
    if n is None:
        n = int(rng.integers(3, 9))
    jitter = rng.uniform(0.1, 0.9, n)
    angles = (np.arange(n) + jitter) * (2 * np.pi / n)
    radii = rng.uniform(rmin, rmax, n)
    return [
        (cx + r * np.cos(a), cy + r * np.sin(a)) for a, r in zip(angles, radii)
    ]
