import numpy as np
import pytest

from sigstream.rng import substream


def random_path_corpus(n_paths: int, max_dim: int = 4, max_points: int = 20, seed: int = 2024):
    """Seeded corpus of random piecewise-linear paths (list of (n, d) arrays).

    Coordinates stay in [-0.5, 0.5] so high-level coefficients keep moderate
    magnitude and absolute tolerances are meaningful.
    """
    rng = substream(seed, "path-corpus")
    paths = []
    for _ in range(n_paths):
        d = int(rng.integers(1, max_dim + 1))
        n = int(rng.integers(2, max_points + 1))
        paths.append(rng.uniform(-0.5, 0.5, size=(n, d)))
    return paths


@pytest.fixture(scope="session")
def path_corpus():
    return random_path_corpus(200)
