"""Central finite differences used wherever a model has no analytic derivative."""

from typing import Callable

import numpy as np

from hamflow.tools.errors import ModelDomainError, NumericalError

RELATIVE_STEP = 1e-6
MINIMUM_STEP = 1e-8


def step_sizes(scale) -> np.ndarray:
    """Per-component step h_i = max(1e-6 |scale_i|, 1e-8)."""
    return np.maximum(RELATIVE_STEP * np.abs(np.asarray(scale, dtype=float)), MINIMUM_STEP)


def fd_gradient(f: Callable[[np.ndarray], float], x, scale=None) -> np.ndarray:
    """
    Gradient of a scalar function by second-order central differences.

    :param f: Scalar function of an n-vector.
    :param x: Point at which to differentiate.
    :param scale: Typical magnitude of each component, used to size the
        step. Defaults to ``max(|x_i|, 1)``.
    :return: The n-vector of partial derivatives.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if scale is None:
        scale = np.maximum(np.abs(x), 1.0)
    h = np.broadcast_to(step_sizes(scale), x.shape)

    grad = np.empty_like(x)
    for i in range(x.size):
        forward = x.copy()
        backward = x.copy()
        forward[i] += h[i]
        backward[i] -= h[i]
        try:
            f_plus = f(forward)
            f_minus = f(backward)
        except ModelDomainError as err:
            raise ModelDomainError(f"Stencil point for component {i} around {x.tolist()} failed: {err}") from err
        # The realised step can differ from h[i] after rounding.
        grad[i] = (f_plus - f_minus) / (forward[i] - backward[i])

    if not np.all(np.isfinite(grad)):
        raise NumericalError(f"Non-finite finite-difference gradient at {x.tolist()}")
    return grad
