"""Package integration_tests."""

import pytest

pytest.register_assert_rewrite("integration_tests.utils")
