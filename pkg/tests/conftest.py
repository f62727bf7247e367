import random

from hypothesis import HealthCheck, settings, strategies as st

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")

# most properties draw a seed and build the instance with the package generators,
# so shrinking works on one integer
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def rng_of(seed: int) -> random.Random:
    return random.Random(seed)


# acceptance criteria report one line each; collected here and printed in the summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
