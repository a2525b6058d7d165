from eivslope.dataset import Dataset
from eivslope.posterior import PosteriorModel, build_model, sufficient_stats

__all__ = ("Dataset", "PosteriorModel", "build_model", "sufficient_stats")
