"""Issue-based dialogue manager for negotiative phone-directory dialogues."""

__version__ = "0.1.0"

from .ddd import Domain, parse_ddd, validate
from .engine import InformationState, integrate, new_session
from .kb import DirectoryKb, load_fixture, search
from .nl import Lexicon, generate, interpret
from .service import SessionStore, load_context

__all__ = [
    "Domain",
    "parse_ddd",
    "validate",
    "InformationState",
    "integrate",
    "new_session",
    "DirectoryKb",
    "load_fixture",
    "search",
    "Lexicon",
    "generate",
    "interpret",
    "SessionStore",
    "load_context",
    "__version__",
]
