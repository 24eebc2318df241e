"""Random additive/multiplicative patterns in Bernoulli subsets of the naturals."""
from .errors import DomainError, ResourceError, SizeError
from .model import DenseSample, SubsetModel, contains, materialize
from .patterns import Kind, PatternInstance, exp_probe, fp, fp_probe, fs, fs_probe, quadruple

__all__ = [
    "DenseSample", "DomainError", "Kind", "PatternInstance", "ResourceError", "SizeError",
    "SubsetModel", "contains", "exp_probe", "fp", "fp_probe", "fs", "fs_probe", "materialize",
    "quadruple",
]
