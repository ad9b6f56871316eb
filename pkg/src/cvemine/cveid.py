"""CVE identifier syntax: validation and normalization shared across the package."""
from __future__ import annotations

import re

# Canonical form: CVE-<4 digit year>-<4..7 digit sequence>. ASCII digits only.
CANONICAL_CVE_RE = re.compile(r"CVE-\d{4}-\d{4,7}", re.IGNORECASE | re.ASCII)


class InvalidCveIdError(ValueError):
    """Raised when a string is not a syntactically valid CVE identifier."""

    def __init__(self, value: str):
        super().__init__(f"not a valid CVE identifier: {value!r}")
        self.value = value


def normalize_cve_id(value: str) -> str:
    """Uppercase a CVE identifier without validating it."""
    return value.strip().upper()


def is_valid_cve_id(value: str) -> bool:
    return CANONICAL_CVE_RE.fullmatch(value.strip()) is not None


def require_cve_id(value: str) -> str:
    """Normalize and validate, returning the canonical uppercase id.

    Raises InvalidCveIdError for pattern-invalid input; validation failure is
    distinct from a lookup miss.
    """
    normalized = normalize_cve_id(value)
    if not CANONICAL_CVE_RE.fullmatch(normalized):
        raise InvalidCveIdError(value)
    return normalized
