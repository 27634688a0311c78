import numpy as np

from weinorman.schedule import ControlSchedule


class Cosine:
    def __init__(self, amp, freq, phase):
        self.amp, self.freq, self.phase = amp, freq, phase

    def __call__(self, t):
        return self.amp * np.cos(self.freq * t + self.phase)


def random_schedule(rng, n, horizon=1.0, scale=0.5):
    """Smooth random drive: constant drift plus one cosine per channel."""
    drift = rng.uniform(-scale, scale, n)
    controls = {
        j: Cosine(rng.uniform(-scale, scale), rng.uniform(0.5, 3.0), rng.uniform(0, 2 * np.pi))
        for j in range(1, n + 1)
    }
    return ControlSchedule(drift, controls, horizon)


def coords_by_trace(basis, x):
    """Coordinates through a least-squares solve on flattened matrices (independent of the Gram route)."""
    a = basis.elements.reshape(basis.n, -1).T
    sol, *_ = np.linalg.lstsq(np.vstack([a.real, a.imag]),
                              np.concatenate([x.ravel().real, x.ravel().imag]), rcond=None)
    return sol
