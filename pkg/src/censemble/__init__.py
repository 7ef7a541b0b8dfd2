"""Eigenvector-ensemble numerics for fixed-spectrum Hamiltonians."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("censemble")
except PackageNotFoundError:  # pragma: no cover
    __version__ = "0.0.0"
