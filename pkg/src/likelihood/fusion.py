"""Log-space fusion of vision and scan likelihoods."""

import numpy as np

from src.utils.errors import InvalidArgumentError


def fused_log_likelihood(vision_ll, scan_ll, fusion_lambda: float = 1500.0):
    """vision_ll + scan_ll / lambda, elementwise for arrays."""
    if not fusion_lambda > 0:
        raise InvalidArgumentError(f"lambda must be positive, got {fusion_lambda}")
    result = np.asarray(vision_ll, dtype=np.float64) + np.asarray(scan_ll, dtype=np.float64) / fusion_lambda
    return float(result) if result.ndim == 0 else result
