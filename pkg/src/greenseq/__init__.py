"""greenseq: quiver mutation, maximal green sequences and minimal-length constructions."""

from .classify import classify, min_length
from .construct import min_mgs
from .exceptions import GreenSeqError
from .green_seq import GreenSequence, apply_green_sequence, is_maximal_green, shortest_mgs
from .quiver_core import IceQuiver, Quiver, Seed, framed, mutate

__version__ = "0.3.0"
