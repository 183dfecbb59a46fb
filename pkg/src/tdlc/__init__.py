"""Scale functions and tidy subgroups for endomorphisms of t.d.l.c. groups."""

__version__ = "0.1.0"
