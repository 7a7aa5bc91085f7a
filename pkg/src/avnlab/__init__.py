"""Numerical checks of an all-versus-nothing refutation of local and
noncontextual hidden variables built from three singlets and a GHZ analyzer.

Modules: ``qcore`` (states and Pauli algebra), ``avn`` (state, correlations,
Mermin operators, noise), ``hvsearch`` (value-assignment searches),
``ghzlab`` (GHZ analyzer, swapping, sampling), ``report`` and ``cli``.
"""

__version__ = "0.1.0"
