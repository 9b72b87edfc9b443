"""Extended kinematic graphs: parts joined by edges carrying ordered local models."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Hashable, List, Sequence, Tuple

import networkx as nx

from logger import log_error, log_info
from changepoint.segmentation import ConfigurationalSegmentation
from kinematics.error_types import DisconnectedGraphError, ValidationError

PartId = Hashable


@dataclass(frozen=True)
class CandidateEdge:
    """Pairwise segmentation result between two parts with its log-MAP score."""
    i: PartId
    j: PartId
    config: ConfigurationalSegmentation
    score: float = 0.0


@dataclass(frozen=True)
class GraphEdge:
    i: PartId
    j: PartId
    config: ConfigurationalSegmentation
    score: float = 0.0

    @property
    def n_models(self) -> int:
        return len(self.config)


@dataclass(frozen=True)
class ExtendedKinematicGraph:
    parts: Tuple[PartId, ...]
    edges: Tuple[GraphEdge, ...]

    def is_tree(self) -> bool:
        """|E| = |V| - 1 and every part reachable."""
        return is_spanning_tree(self.parts, [(e.i, e.j) for e in self.edges])


def part_graph(parts: Sequence[PartId], pairs: Sequence[Tuple[PartId, PartId]]) -> nx.Graph:
    G = nx.Graph()
    G.add_nodes_from(parts)
    G.add_edges_from(pairs)
    return G


def is_spanning_tree(parts: Sequence[PartId], pairs: Sequence[Tuple[PartId, PartId]]) -> bool:
    """True when ``pairs`` join every part with no cycle and no repeated or foreign edge."""
    parts = list(parts)
    known = set(parts)
    if not parts or len(pairs) != len(parts) - 1 or any(i not in known or j not in known for i, j in pairs):
        return False
    return nx.is_tree(part_graph(parts, pairs))


def build_graph(parts: Sequence[PartId], candidates: Sequence[CandidateEdge]) -> ExtendedKinematicGraph:
    """Assemble the extended kinematic graph from pairwise segmentations.

    Two parts take their single (best) candidate; more parts take the spanning
    tree maximizing the total log-MAP score.

    Raises:
        ValidationError: on fewer than 2 parts, duplicate parts or unknown endpoints
        DisconnectedGraphError: when the candidates do not connect every part
    """
    parts = tuple(parts)
    if len(parts) < 2:
        raise ValidationError("a kinematic graph needs at least 2 parts", {'parts': list(parts)})
    if len(set(parts)) != len(parts):
        raise ValidationError("part ids must be unique", {'parts': list(parts)})
    known = set(parts)
    best: Dict[frozenset, CandidateEdge] = {}
    for candidate in candidates:
        if candidate.i not in known or candidate.j not in known or candidate.i == candidate.j:
            raise ValidationError("candidate edge has unknown or repeated endpoints",
                                  {'i': candidate.i, 'j': candidate.j})
        key = frozenset((candidate.i, candidate.j))
        if key not in best or candidate.score > best[key].score:
            best[key] = candidate

    chosen: List[CandidateEdge] = list(best.values())
    G = part_graph(parts, [])
    for c in chosen:
        G.add_edge(c.i, c.j, score=c.score, candidate=c)
    if not nx.is_connected(G):
        log_error("Candidate edges do not connect all parts", extra={'parts': [str(p) for p in parts]})
        raise DisconnectedGraphError("candidate edges do not connect every part",
                                     {'parts': [str(p) for p in parts], 'edges': len(chosen)})

    if len(parts) > 2:
        tree = nx.maximum_spanning_tree(G, weight='score', algorithm='kruskal')
        chosen = [data['candidate'] for _, _, data in tree.edges(data=True)]

    order = {p: k for k, p in enumerate(parts)}
    chosen.sort(key=lambda c: (min(order[c.i], order[c.j]), max(order[c.i], order[c.j])))
    edges = tuple(GraphEdge(c.i, c.j, c.config, c.score) for c in chosen)
    log_info("Built kinematic graph", extra={
        'parts': [str(p) for p in parts],
        'edges': [[str(e.i), str(e.j), [k.value for k in e.config.kinds]] for e in edges]
    })
    return ExtendedKinematicGraph(parts, edges)
