"""
Qualitative evidence scale for Bayes factors B01
"""

from enum import Enum

import numpy as np

from ..utils.exceptions import DomainError


class EvidenceCategory(str, Enum):
    NEGATIVE = "negative"
    BARE_MENTION = "bare_mention"
    POSITIVE = "positive"
    SUBSTANTIAL = "substantial"
    STRONG = "strong"
    DECISIVE = "decisive"

    @property
    def label(self) -> str:
        return self.value.replace("_", " ")


# Lower edges; each band is closed below and open above
_BANDS = (
    (20.0, EvidenceCategory.DECISIVE),
    (10.0, EvidenceCategory.STRONG),
    (5.0, EvidenceCategory.SUBSTANTIAL),
    (1.5, EvidenceCategory.POSITIVE),
    (1.0, EvidenceCategory.BARE_MENTION),
)


def interpret_bf(b01: float) -> EvidenceCategory:
    """Evidence in favour of H0 carried by b01"""
    if not b01 > 0 or np.isnan(b01):
        raise DomainError(f"Bayes factor must be positive, got {b01!r}")
    for lower, category in _BANDS:
        if b01 >= lower:
            return category
    return EvidenceCategory.NEGATIVE


def interpret_log_bf(log_b01: float) -> EvidenceCategory:
    """Same scale applied to log B01, for factors beyond the float range"""
    if np.isnan(log_b01):
        raise DomainError("log Bayes factor is NaN")
    for lower, category in _BANDS:
        if log_b01 >= np.log(lower):
            return category
    return EvidenceCategory.NEGATIVE
