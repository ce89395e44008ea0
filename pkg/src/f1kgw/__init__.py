"""K-theory and Grothendieck-Witt invariants of monoid schemes, at the level of pi_0."""

__version__ = "0.1.0"
