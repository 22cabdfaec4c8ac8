import warnings

import pytest

from mzqfi.errors import TruncationWarning


@pytest.fixture(autouse=True)
def _silence_truncation_warnings():
    # Cutoff adequacy is asserted explicitly where it matters; routine
    # truncation chatter would otherwise drown the test output.
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        yield
