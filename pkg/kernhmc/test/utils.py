import traceback
import numpy as np


def show_cli_trace(result):
    if result.exc_info is None:
        return result.output
    return "".join(traceback.format_exception(*result.exc_info))


def central_difference(func, x, h=1e-5):
    """Central finite-difference gradient of a scalar function"""
    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    for i in range(x.shape[0]):
        step = np.zeros_like(x)
        step[i] = h
        grad[i] = (func(x + step) - func(x - step)) / (2 * h)
    return grad


def second_central_difference(func, x, h=1e-4):
    """Central finite-difference diagonal of the Hessian of a scalar function"""
    x = np.asarray(x, dtype=float)
    diag = np.empty_like(x)
    f0 = func(x)
    for i in range(x.shape[0]):
        step = np.zeros_like(x)
        step[i] = h
        diag[i] = (func(x + step) - 2 * f0 + func(x - step)) / h**2
    return diag
