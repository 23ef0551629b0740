"""Exception hierarchy shared across the toolkit."""


class MotifscopeError(Exception):
    """Base class for all toolkit errors."""


# -- graph ingestion ---------------------------------------------------------

class GraphFormatError(MotifscopeError):
    """Input graph data is invalid."""


class MalformedRow(GraphFormatError):
    def __init__(self, line, reason="malformed row", path=None):
        self.line = line
        self.reason = reason
        self.path = path
        where = f"{path}:" if path else "line "
        super().__init__(f"{where}{line}: {reason}")


class SelfLoop(GraphFormatError):
    def __init__(self, line, vertex=None):
        self.line = line
        self.vertex = vertex
        super().__init__(f"line {line}: self-loop on vertex {vertex!r}")


class AttributeForUnknownVertex(GraphFormatError):
    def __init__(self, vertex_id):
        self.vertex_id = vertex_id
        super().__init__(f"attribute row for unknown vertex {vertex_id!r}")


class AttributeForUnknownEdge(GraphFormatError):
    def __init__(self, src, dst):
        self.edge = (src, dst)
        super().__init__(f"attribute row for unknown edge {src!r} -> {dst!r}")


class AttributeTypeError(MotifscopeError):
    """Ordering comparison between attribute values of different types."""


# -- motif language ----------------------------------------------------------

class MotifError(MotifscopeError):
    """Invalid motif query."""


class MotifSyntaxError(MotifError):
    def __init__(self, line, column, expected, found=None):
        self.line = line
        self.column = column
        self.expected = expected
        self.found = found
        msg = f"{line}:{column}: expected {expected}"
        if found is not None:
            msg += f", found {found!r}"
        super().__init__(msg)


class ContradictoryEdges(MotifError):
    def __init__(self, pair):
        self.pair = tuple(pair)
        super().__init__(f"contradictory edge constraints on {pair[0]} / {pair[1]}")


class DisconnectedMotif(MotifError):
    def __init__(self, components=None):
        self.components = components
        super().__init__("motif edge constraints do not form a weakly connected graph")


class UnknownVertexInPredicate(MotifError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"predicate refers to vertex {name!r} that has no edge statement")


class MotifTooLarge(MotifError):
    def __init__(self, size, cap):
        self.size = size
        self.cap = cap
        super().__init__(f"motif has {size} vertices; the cap is {cap}")


class UndirectedEdgesPresent(MotifError):
    """Topology classification needs a fully directed motif."""


# -- search / randomization --------------------------------------------------

class SearchTimeout(MotifscopeError):
    """Search exceeded its time budget; ``result`` holds a lower-bound count."""

    def __init__(self, budget, result):
        self.budget = budget
        self.result = result
        super().__init__(
            f"search exceeded {budget:g}s budget after {result.count} mappings")


class TooFewEdges(MotifscopeError):
    def __init__(self, n_edges):
        self.n_edges = n_edges
        super().__init__(f"graph has {n_edges} edges; randomization needs at least one")


class EnsembleFailure(MotifscopeError):
    """Null ensemble could not be built for discovery."""
