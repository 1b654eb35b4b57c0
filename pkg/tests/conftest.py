import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sinrcap.model import GeneratorConfig, Instance, SinrParams, generate, load  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"

WORLDS = (5.0, 10.0, 20.0, 40.0)
DELTAS = (2.0, 4.0, 16.0, 64.0, 256.0)


def corpus(count=200, n_min=4, n_max=12, params=None):
    """Deterministic mixed-density corpus: n cycles n_min..n_max, worlds and Delta vary."""
    out = []
    for i in range(count):
        cfg = GeneratorConfig(
            n=n_min + i % (n_max - n_min + 1),
            world_size=WORLDS[(i // 3) % len(WORLDS)],
            target_delta=DELTAS[(i // 7) % len(DELTAS)],
            seed=i,
        )
        out.append(generate(cfg, params or SinrParams()))
    return out


def far_apart(n=5, params=None):
    rows = [(1e7 * i, 0.0, 1e7 * i + 1.0 + 0.1 * i, 0.0) for i in range(n)]
    return Instance.euclidean(rows, params or SinrParams())


def colocated(k=3, params=None):
    return Instance.euclidean([(0.0, 0.0, 1.0, 0.0)] * k, params or SinrParams())


@pytest.fixture
def two_links():
    return load(FIXTURES / "two_links.json")


def instances(n_min=1, n_max=8, noise=(0.0, 1.0)):
    """Hypothesis strategy over generated instances with varied SINR parameters."""
    from hypothesis import strategies as st

    @st.composite
    def build(draw):
        params = SinrParams(
            alpha=draw(st.sampled_from([2.0, 2.5, 3.0, 4.0])),
            beta=draw(st.sampled_from([0.5, 1.0, 2.0, 3.0])),
            noise=draw(st.sampled_from(noise)),
        )
        cfg = GeneratorConfig(
            n=draw(st.integers(n_min, n_max)),
            world_size=draw(st.sampled_from(WORLDS)),
            target_delta=draw(st.sampled_from(DELTAS)),
            seed=draw(st.integers(0, 2**31)),
        )
        return generate(cfg, params)

    return build()


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
