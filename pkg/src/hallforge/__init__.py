"""hallforge: exact degenerate Ringel-Hall algebra computations.

Structure constants of the convolution algebra of constructible functions
on isomorphism classes of quiver representations, computed by exhaustive
point counting over finite fields, polynomial interpolation in q, and
specialization at q = 1.  Ships three backends: type-A quivers with any
orientation, nilpotent loop-quiver representations, and the torsion part
of coherent sheaves on the projective line.
"""

__version__ = "0.1.0"
