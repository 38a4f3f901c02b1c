"""Exception hierarchy shared across the workbench."""


class NetmedError(Exception):
    """Base class for all workbench errors."""


# --- graph store ---

class ParseError(NetmedError):
    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = path
        self.line_no = line_no


class SchemaViolation(NetmedError):
    pass


class DanglingEdge(NetmedError):
    def __init__(self, line_no, source, target):
        super().__init__(f"edge line {line_no}: missing endpoint ({source} -> {target})")
        self.line_no = line_no
        self.source = source
        self.target = target


class UnknownNode(NetmedError):
    pass


# --- network algorithms ---

class DomainError(NetmedError):
    pass


class EmptySeeds(NetmedError):
    pass


class SeedNotInGraph(NetmedError):
    def __init__(self, node_id):
        super().__init__(f"seed not in graph: {node_id}")
        self.node_id = node_id


class NoDrugNodes(NetmedError):
    pass


# --- coherence ---

class TooFewGenes(NetmedError):
    pass


class BackgroundTooSmall(NetmedError):
    pass


# --- query engine ---

class MalformedDecomposition(NetmedError):
    pass


class NoCandidates(NetmedError):
    pass


class AmbiguousPath(NetmedError):
    pass


class NoSchemaPath(NetmedError):
    pass


# --- providers ---

class ProviderError(NetmedError):
    pass


class ProviderUnreachable(ProviderError):
    pass


class MalformedResponse(ProviderError):
    pass


class ScriptExhausted(ProviderError):
    pass


class ScriptMismatch(ProviderError):
    pass


class PartialContent(ProviderError):
    def __init__(self, message, partial):
        super().__init__(message)
        self.partial = partial


# --- orchestrator ---

class GuardrailRejected(NetmedError):
    pass


# --- research client ---

class BackendUnreachable(NetmedError):
    pass


# --- evalkit ---

class TranscriptMissing(NetmedError):
    def __init__(self, case_id):
        super().__init__(f"no transcript for case {case_id}")
        self.case_id = case_id


# --- service ---

class UnknownKG(NetmedError):
    pass


class UnknownSession(NetmedError):
    pass


class SessionBusy(NetmedError):
    pass


class UnknownAnalysis(NetmedError):
    pass
