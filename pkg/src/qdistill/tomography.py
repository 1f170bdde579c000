"""State estimation from sampled product-Pauli measurements."""

import numpy as np

from .geometry import HsForm, decompose, reconstruct


def _sample(rng, expectation, shots):
    p_plus = min(1.0, max(0.0, 0.5 * (1.0 + expectation)))
    return 2.0 * rng.binomial(shots, p_plus) / shots - 1.0


def estimate_state(rho_true, shots_per_observable, seed):
    """Reconstruct ``rho_true`` from ``shots_per_observable`` +-1 outcomes of each
    of the 15 nontrivial Pauli products. ``shots_per_observable = 0`` uses
    exact expectations. Unphysical estimates are repaired by clamping
    negative eigenvalues.
    """
    if shots_per_observable < 0:
        raise ValueError("shots_per_observable must be >= 0")
    form = decompose(rho_true)
    if shots_per_observable == 0:
        return reconstruct(form)
    rng = np.random.default_rng(seed)
    r = np.array([_sample(rng, x, shots_per_observable) for x in form.r])
    s = np.array([_sample(rng, x, shots_per_observable) for x in form.s])
    t = np.array([[_sample(rng, x, shots_per_observable) for x in row] for row in form.t])
    return reconstruct(HsForm(r, s, t), repair=True)


def frobenius_error(a, b):
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)))
