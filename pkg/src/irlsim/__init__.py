"""irlsim: offline inverse-RL toolkit.

Learns a virtual environment — a high-entropy Gaussian dynamics ensemble plus
a bounded discriminator-style reward — from reward-free (s, a, s') datasets,
then trains policies entirely inside it.
"""

__version__ = "0.1.0"

from . import data, envs, harness, numerics, policy, simulator  # noqa: F401
