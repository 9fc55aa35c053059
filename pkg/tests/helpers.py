"""Random parameter draws shared by the property tests."""
import math

import numpy as np

from darkcavity.params import ThreeModeParams, TwoModeParams


def random_two_mode(rng, lambda_min=0.01, gamma_min=0.1):
    return TwoModeParams(
        delta1=rng.uniform(-3, 3), delta2=rng.uniform(-3, 3),
        gamma1=rng.uniform(gamma_min, 3), gamma2=rng.uniform(gamma_min, 3),
        J=rng.uniform(0.1, 3),
        lambda1_mag=rng.uniform(lambda_min, 1), lambda2_mag=rng.uniform(lambda_min, 1),
        phi=rng.uniform(-math.pi, math.pi),
    )


def random_three_mode(rng, **kw):
    return ThreeModeParams(random_two_mode(rng, **kw), delta_b=rng.uniform(-3, 3),
                           gamma_b=rng.uniform(0.1, 3), eta=rng.uniform(0, 3))


def rel_err(a, b):
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300))
