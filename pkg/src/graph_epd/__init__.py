"""
graph_epd: exact and learned extended persistence diagrams of filtered graphs.

The scripts of ``src/`` are thin command-line layers over this package:

- ``graph``        graph type, components, k-hop vicinities, SBM generator
- ``filtration``   vertex filters (degree, HKS, Ricci distance, ...) and the strict orders
- ``union_find``   disjoint sets with path compression and operation counts
- ``persistence``  diagram types, elder-rule 0D sweep, decomposed Union-Find engine
- ``reduction``    boundary-matrix reduction of the extended filtration
- ``engines``      engine dispatch
- ``diagrams``     W2 distance, persistence images, PIE
- ``pdgnn``        the neural approximator, training and model files
- ``io``           text artifacts and tables
"""

import logging

logging.getLogger(__name__).addHandler(logging.NullHandler())

__version__ = "1.0.0"
