import pytest

from latbox import apply_context, set_working_digits


@pytest.fixture(autouse=True)
def _default_precision():
    """Every test starts from the stock 50-digit working precision."""
    set_working_digits(50)
    apply_context()
    yield
    set_working_digits(50)
    apply_context()
