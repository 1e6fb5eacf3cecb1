"""Exact q-series machinery for Bailey-lemma flows between minimal models
and N=1, N=2 superconformal characters, with fermionic sum search."""

from .qseries import INF, QSeries
from .bivariate import ZQSeries

__all__ = ["INF", "QSeries", "ZQSeries"]
__version__ = "0.1.0"
