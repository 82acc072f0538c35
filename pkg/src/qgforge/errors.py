"""Exception types shared across the package.

Validation findings are data, not exceptions; everything here signals a
contract violation the caller must handle.
"""

from __future__ import annotations


class QgError(Exception):
    """Base class for all qgforge errors."""


class MalformedName(QgError, ValueError):
    """A gate name does not match the required pattern.

    ``position`` is the index of the first offending character in the
    input text.
    """

    def __init__(self, text: str, position: int, reason: str):
        super().__init__(f"malformed gate name {text!r} at position {position}: {reason}")
        self.text = text
        self.position = position
        self.reason = reason


# --- storage ---------------------------------------------------------------

class StoreError(QgError):
    pass


class MissingManifest(StoreError):
    def __init__(self, path):
        super().__init__(f"no manifest file in {path}")
        self.path = path


class RepoSyntaxError(StoreError):
    """A repository file could not be parsed or has the wrong shape."""

    def __init__(self, file, message: str, line: int | None = None):
        where = f"{file}:{line}" if line is not None else str(file)
        super().__init__(f"{where}: {message}")
        self.file = file
        self.line = line


class DuplicateGateFile(StoreError):
    def __init__(self, name: str, first, second):
        super().__init__(f"gate {name!r} is defined by both {first} and {second}")
        self.name = name
        self.first = first
        self.second = second


# --- graph queries ----------------------------------------------------------

class UnknownGate(QgError):
    def __init__(self, name: str):
        super().__init__(f"no gate named {name!r} in the repository")
        self.name = name


class UnvalidatedRepository(QgError):
    """The repository has dangling references; build a graph only on clean repos."""


class NotACollection(QgError):
    def __init__(self, name: str):
        super().__init__(f"{name!r} is not a collection gate")
        self.name = name


class EmptyScope(QgError):
    def __init__(self, name: str):
        super().__init__(f"collection {name!r} contains no leaf gates")
        self.name = name


# --- versioning ---------------------------------------------------------------

class NotDesignKnowledge(QgError):
    """pull() requires a design-knowledge repository as its source."""


class DuplicateBranch(QgError):
    def __init__(self, name: str):
        super().__init__(f"branch {name!r} already exists")
        self.name = name


class UnknownBranch(QgError):
    def __init__(self, name: str):
        super().__init__(f"no branch named {name!r}")
        self.name = name


class PatchError(QgError):
    """A change set does not apply cleanly to the target repository."""


class MergeConflicts(QgError):
    """Both sides changed the same field to different values."""

    def __init__(self, conflicts):
        super().__init__(f"{len(conflicts)} merge conflict(s)")
        self.conflicts = tuple(conflicts)


class PostMergeInvalid(QgError):
    """The merged repository failed validation; the merge is rejected."""

    def __init__(self, findings):
        super().__init__(f"merged repository is invalid: {len(findings)} finding(s)")
        self.findings = tuple(findings)


# --- explanation scoring ------------------------------------------------------

class BundleError(QgError, ValueError):
    """An explanation bundle violates the wire format.

    ``path`` locates the offending field, e.g. ``splits[1][3]``.
    """

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class EmptyMatrix(QgError):
    pass


class LengthMismatch(QgError):
    pass


class AllZeroReference(QgError):
    """Reference relevances are all zero; the ideal ranking gain is undefined."""


class TooFewSplits(QgError):
    pass


class DegenerateData(QgError):
    """Synthetic label generation collapsed to a single class."""
