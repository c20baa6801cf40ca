"""Results archive for certified runs."""

from .db import ResultArchive
from .models import Certificate, Run, RunStatus

__all__ = [
    'ResultArchive',
    'Certificate',
    'Run',
    'RunStatus',
]
