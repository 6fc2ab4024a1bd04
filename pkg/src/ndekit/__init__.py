"""Long-range diatomic curves, semiclassical level oracle and near-dissociation fits."""

__version__ = "0.1.0"
