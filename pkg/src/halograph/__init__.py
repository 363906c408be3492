"""Design quantum-optics experiments as graphs and reuse their emitters.

Vertices are detectors (or incoming photons), colored weighted edges are
photon-pair sources, and the post-selected state is the weighted sum over
perfect matchings.  Subgraphs that act as multi-photon sources can be cut
out as templates and pasted into larger designs.
"""

from halograph.constructions import (construct_cnot, construct_ghz, construct_ghz_family_63,
                                      construct_swapping, load_template)
from halograph.errors import (ArityMismatch, DuplicateKet, HaloGraphError, InvalidGraph,
                              InvalidParam, MissingTemplate, NoSolution, NotAHalo, ParseError,
                              ShapeMismatch, UnassignedInput, ZeroState)
from halograph.graph import (AMPLITUDE_EPSILON, Edge, Graph, MatchingTable, PerfectMatching,
                             StateVector, complete_graph, enumerate_perfect_matchings,
                             normalize, state_from_graph)
from halograph.halo import (HaloTemplate, Hyperedge, Hypergraph, expand, extract_halo,
                            hypergraph_state, validate_template)
from halograph.optimize import (DiscoveryResult, OptimizerConfig, count_rate, discover,
                                fidelity, fidelity_gradient, optimize_weights)
from halograph.states import TargetSpec, bell, ghz, parse_target
from halograph.verify import (GateSpec, VerificationReport, project_inputs, verify_gate,
                              verify_state)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
