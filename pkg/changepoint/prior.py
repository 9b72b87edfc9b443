"""Truncated geometric segment-length prior."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from logger import log_error
from kinematics.error_types import ValidationError


@dataclass(frozen=True)
class SegmentLengthPrior:
    """β(L) ∝ p·(1-p)^(L-min_len) on [min_len, max_len], zero elsewhere.

    Lengths count observations. ``log_survival(L)`` is ln(1 - B(L)) where B is
    the running sum of β, the hazard bookkeeping the filtering recursion uses.
    """
    p: float = 0.01
    min_len: int = 10
    max_len: int = 10000

    def validate(self):
        """Validate the prior parameters"""
        if not 0.0 < self.p < 1.0:
            log_error("Segment prior probability out of range", extra={'p': self.p})
            raise ValidationError("prior p must lie in (0, 1)", {'p': self.p})
        if self.min_len < 2:
            log_error("Minimum segment length too small", extra={'min_len': self.min_len})
            raise ValidationError("min_len must be at least 2", {'min_len': self.min_len})
        if self.max_len < self.min_len:
            log_error("Maximum segment length below minimum", extra={
                'min_len': self.min_len, 'max_len': self.max_len
            })
            raise ValidationError("max_len must be at least min_len",
                                  {'min_len': self.min_len, 'max_len': self.max_len})
        return self

    @property
    def support_size(self) -> int:
        return self.max_len - self.min_len + 1

    @property
    def _log_q(self) -> float:
        return float(np.log1p(-self.p))

    @property
    def _log_norm(self) -> float:
        return float(np.log(-np.expm1(self.support_size * self._log_q)))

    def log_beta(self, length):
        """ln β(length); -inf outside [min_len, max_len]."""
        length = np.asarray(length, dtype=float)
        inside = (length >= self.min_len) & (length <= self.max_len)
        with np.errstate(invalid='ignore'):
            value = np.log(self.p) + (length - self.min_len) * self._log_q - self._log_norm
        out = np.where(inside, value, -np.inf)
        return float(out) if out.ndim == 0 else out

    def log_survival(self, length):
        """ln(1 - B(length)); 0 below min_len, -inf from max_len on."""
        length = np.asarray(length, dtype=float)
        k = length - self.min_len + 1
        remaining = self.support_size - k
        with np.errstate(divide='ignore', invalid='ignore'):
            value = k * self._log_q + np.log(-np.expm1(remaining * self._log_q)) - self._log_norm
        out = np.where(length < self.min_len, 0.0, np.where(length >= self.max_len, -np.inf, value))
        return float(out) if out.ndim == 0 else out

    def pmf(self, length):
        return np.exp(self.log_beta(length))

    def cdf(self, length):
        """B(length)."""
        return -np.expm1(self.log_survival(length))
