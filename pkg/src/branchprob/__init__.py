"""Algorithmic-probability measures over branching continuers.

Submodules:

- ``statevec``: complex state vectors and observation-basis decomposition
- ``dft_codec``: truncated-DFT lossy codec with a self-delimiting container
- ``entropy``: compressor-based algorithmic entropy estimates
- ``measures``: flat, copy-count, Born and algorithmic continuer measures
- ``scenarios``: replicator / quantum / codec experiments and comparisons
- ``cli``: command-line entry point
"""

__version__ = "0.1.0"
