"""Neural SDF fixture generation: handcrafted exact networks and
seeded gradient-descent training, exported as JSON network files."""

from .handcrafted import make_handcrafted
from .train import ConvergenceError, FixtureSpec, TrainingConfig, train_fixture, train_network
