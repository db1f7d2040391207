from .types import (
    Annotation,
    Entity,
    EntityKind,
    EntitySource,
    ExtractionConfig,
    Fragment,
    OperationRecord,
    StoryDocument,
    TextSpan,
)
from .document import (
    add_entity,
    apply_edit_script,
    create_fragment,
    delete_entity,
    delete_fragment,
    merge_fragments,
    new_document,
    recent_entities,
    rename_entity,
    replay_oplog,
    set_fragment_interval,
    update_fragment,
)
from .store import document_from_dict, document_to_dict, load_document, save_document

__all__ = [
    "Annotation",
    "Entity",
    "EntityKind",
    "EntitySource",
    "ExtractionConfig",
    "Fragment",
    "OperationRecord",
    "StoryDocument",
    "TextSpan",
    "add_entity",
    "apply_edit_script",
    "create_fragment",
    "delete_entity",
    "delete_fragment",
    "merge_fragments",
    "new_document",
    "recent_entities",
    "rename_entity",
    "replay_oplog",
    "set_fragment_interval",
    "update_fragment",
    "document_from_dict",
    "document_to_dict",
    "load_document",
    "save_document",
]
