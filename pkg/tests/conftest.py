import numpy as np
import pytest

from lgcp_duplicates.geometry import PointPattern, Window


@pytest.fixture
def square() -> Window:
    return Window.rectangle(0.0, 810.0, 0.0, 810.0)


@pytest.fixture
def unit_square() -> Window:
    return Window.rectangle(0.0, 1.0, 0.0, 1.0)


@pytest.fixture
def l_shape() -> Window:
    return Window.from_vertices([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])


@pytest.fixture
def csr_pattern(square) -> PointPattern:
    rng = np.random.default_rng(11)
    return PointPattern(points=rng.uniform(0.0, 810.0, size=(300, 2)), window=square)


@pytest.fixture
def clustered_pattern(square) -> PointPattern:
    """Two dense clusters plus background, enough structure for bandwidth selection."""
    rng = np.random.default_rng(5)
    a = rng.normal((200.0, 200.0), 40.0, size=(120, 2))
    b = rng.normal((600.0, 550.0), 60.0, size=(120, 2))
    bg = rng.uniform(0.0, 810.0, size=(60, 2))
    pts = np.clip(np.vstack([a, b, bg]), 0.0, 810.0)
    return PointPattern(points=pts, window=square)
