"""Eta-quotients, q-series arithmetic and k-regular partition congruences."""
from . import arith, congruence, etaquot, partitions, qseries
from .congruence import derive_params, search_serre_primes, verify_final
from .etaquot import EtaQuotient
from .qseries import QSeries

__all__ = ["arith", "qseries", "etaquot", "partitions", "congruence",
           "EtaQuotient", "QSeries", "derive_params", "search_serre_primes", "verify_final"]
__version__ = "0.1.0"
