"""Shared exception types.

Every module raises subclasses of StoryExpError so callers (service, CLI)
can map failures to HTTP codes / exit codes without string matching.
"""

from __future__ import annotations


class StoryExpError(Exception):
    """Base class for all engine errors."""


# -- document / entity / fragment model ------------------------------------

class UnknownEntity(StoryExpError):
    pass


class WrongEntityKind(StoryExpError):
    pass


class EmptyPersons(StoryExpError):
    pass


class DuplicateName(StoryExpError):
    pass


class UnknownFragment(StoryExpError):
    pass


class SameFragment(StoryExpError):
    pass


class InvalidInterval(StoryExpError):
    pass


class IoError(StoryExpError):
    """Filesystem failure while saving or loading a document."""


class CorruptDocument(StoryExpError):
    """Document file failed schema or invariant validation on load."""


# -- ink gestures -----------------------------------------------------------

class DegenerateInk(StoryExpError):
    """All ink points coincide; nothing to recognize."""


class NoTextUnderStroke(StoryExpError):
    pass


# -- extraction -------------------------------------------------------------

class EmptyText(StoryExpError):
    pass


class ProviderUnavailable(StoryExpError):
    pass


class InvalidConfig(StoryExpError):
    pass


# -- layout -----------------------------------------------------------------

class OverlapConflict(StoryExpError):
    """A character is claimed by two fragments at the same time step.

    ``conflicts`` lists (entityId, step, fragmentA, fragmentB) tuples.
    """

    def __init__(self, conflicts: list[tuple[str, int, str, str]]):
        self.conflicts = conflicts
        first = conflicts[0]
        super().__init__(
            f"character {first[0]} appears in fragments {first[2]} and "
            f"{first[3]} at step {first[1]} ({len(conflicts)} conflict(s))"
        )


# -- rendering --------------------------------------------------------------

class UnknownStep(StoryExpError):
    pass


# -- service ----------------------------------------------------------------

class UnknownDocument(StoryExpError):
    pass
