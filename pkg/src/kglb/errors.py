"""Exception hierarchy shared by all kglb modules."""


class KglbError(Exception):
    """Base class for every error raised by this package."""


# dictionary

class InvalidLabel(KglbError):
    """Label string rejected (empty)."""


class UnknownLabelId(KglbError):
    """LabelId was never assigned."""


class AlreadyGrouped(KglbError):
    """Value label is already grouped under a different key label."""


# tuple registry

class InvalidLabelSet(KglbError):
    """Label-id sequence is empty or not strictly sorted."""


class UnknownTuple(KglbError):
    """TupleId is the reserved sentinel, freed, or never issued."""


class RefcountUnderflow(KglbError):
    """release() called on a tuple with no live references; indicates a store bug."""


# label store / graph

class UnknownEntity(KglbError):
    """EntityId out of range for its entity class."""


class CapacityExceeded(KglbError):
    """Entity id would overflow the 64-bit id width."""


# ingestion

class ManifestError(KglbError):
    """Manifest references a missing column or is structurally invalid."""


class ParseError(KglbError):
    """Input file row does not match the header."""

    def __init__(self, message: str, path: str = "", line: int = 0):
        super().__init__(message)
        self.path = path
        self.line = line


# queries

class InvalidQuery(KglbError):
    """Query document rejected (empty predicate, hop cap exceeded, ...)."""


# ontology / clustering

class EmptyGraph(KglbError):
    """Clustering requested over an ontology with no nodes."""


# persistence

class NotASnapshot(KglbError):
    """Input bytes do not start with the snapshot magic."""


class UnsupportedVersion(KglbError):
    """Snapshot format version or endianness tag not supported."""


class CorruptSnapshot(KglbError):
    """Snapshot section truncated or internally inconsistent."""

    def __init__(self, message: str, section_id: int = -1):
        super().__init__(message)
        self.section_id = section_id


# benchmarking

class SpecError(KglbError):
    """Synthetic graph spec is inconsistent."""


class CorrectnessFailure(KglbError):
    """Benchmark comparison found diverging results between the stores."""
