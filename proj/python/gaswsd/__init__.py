"""Gloss-augmented word sense disambiguation: checkpoint scoring and corpus tools."""

try:
    from ._core import (
        LabeledInstance,
        Model,
        SenseInventory,
        SenseRecord,
        __version__,
        evaluate,
        load_checkpoint,
        load_corpus,
        load_inventory,
    )
except ImportError:  # build-tree layout: the extension sits on sys.path directly
    from _core import (
        LabeledInstance,
        Model,
        SenseInventory,
        SenseRecord,
        __version__,
        evaluate,
        load_checkpoint,
        load_corpus,
        load_inventory,
    )

__all__ = [
    "LabeledInstance",
    "Model",
    "SenseInventory",
    "SenseRecord",
    "__version__",
    "evaluate",
    "load_checkpoint",
    "load_corpus",
    "load_inventory",
]
