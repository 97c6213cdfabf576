"""Universal strongly secure network coding via a random linear precoder.

Modules
-------
gf
    Exact arithmetic and linear algebra over GF(p^e).
netcode
    Message layout, precoding, packetisation and wiretap classes.
infoprob
    Message distributions and exact information measures.
secbounds
    Leakage bounds, class counting, block-length planning and audits.
hashcheck
    Two-universality checks for linear hash families.
cli
    Command-line front end.
"""
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
