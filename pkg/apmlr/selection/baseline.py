"""This script defines the Uncertainty, Random and MaxVar policies."""

import numpy as np

from apmlr.posterior import channel_moments
from apmlr.selection.policy import SelectionPolicy


class Uncertainty(SelectionPolicy):
    """Closest example to the MAP hyperplane: argmin |x^T theta_hat|."""
    @property
    def name(self):
        return "Uncertainty"

    @property
    def scoreSign(self):
        return -1

    def scores(self, ctx):
        return np.abs(ctx.candidates.dot(ctx.map_model.theta))


class Random(SelectionPolicy):
    """Uniform draw from the available examples."""
    @property
    def name(self):
        return "Random"

    @property
    def scoreSign(self):
        return 1

    def select(self, ctx):
        if self.spec.rng is None:
            raise ValueError("Random selection needs an RngStream.")
        return int(ctx.available[self.spec.rng.integers(ctx.available.size)])


class MaxVar(SelectionPolicy):
    """Largest channel input variance x^T Sigma x."""
    @property
    def name(self):
        return "MaxVar"

    @property
    def scoreSign(self):
        return 1

    def scores(self, ctx):
        return channel_moments(ctx.posterior, ctx.candidates)[1]
