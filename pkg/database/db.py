"""Database Connection and Session Management for the results archive.
Using SQLAlchemy for ORM and session handling.
"""
import json
import logging
import math
from contextlib import contextmanager
from typing import Iterable, List, Mapping, Optional

from sqlalchemy import create_engine, select, text
from sqlalchemy.orm import sessionmaker, scoped_session
from sqlalchemy.exc import SQLAlchemyError

# Import Base from models to enable table creation
from .models import Base, Certificate, Run, RunStatus
from config import RESULTS_DATABASE_URL

logger = logging.getLogger(__name__)

CERTIFICATE_FIELDS = ("label", "beta", "dh", "threshold", "mixing", "dual_value", "gap", "certified")


def _connect_args(url: str) -> dict:
    return {"check_same_thread": False} if url.startswith("sqlite") else {}


def _float_or_none(value):
    if value is None:
        return None
    value = float(value)
    return None if math.isnan(value) else value


# ---------------------------------------------------------------------------
# Archive
# ---------------------------------------------------------------------------

class ResultArchive:
    """Engine and sessions for one archive URL."""

    def __init__(self, db_url: Optional[str] = None):
        self.db_url = db_url or RESULTS_DATABASE_URL
        self.engine = create_engine(self.db_url, connect_args=_connect_args(self.db_url))
        self.Session = scoped_session(sessionmaker(bind=self.engine, expire_on_commit=False))
        self.logger = logger

    def init_db(self) -> None:
        """Create the runs and certificates tables if they do not exist."""
        try:
            Base.metadata.create_all(self.engine)
            self.logger.info(f"init_db: archive tables ready at {self.db_url}")
        except SQLAlchemyError as e:
            self.logger.error(f"init_db: failed to create tables: {e}")
            raise

    @contextmanager
    def get_session(self):
        """Session with commit on success and rollback on error."""
        session = self.Session()
        try:
            yield session
            session.commit()
        except Exception:
            session.rollback()
            raise
        finally:
            session.close()

    def check_connection(self) -> bool:
        try:
            with self.engine.connect() as conn:
                conn.execute(text("SELECT 1"))
            return True
        except Exception as e:
            self.logger.error(f"check_connection: failed: {e}")
            return False

    # -----------------------------------------------------------------------
    # Runs
    # -----------------------------------------------------------------------

    def record_run(
        self,
        command: str,
        arguments: Mapping,
        certificates: Iterable[Mapping],
        seed: Optional[int] = None,
        log_base: str = "bits",
        status: RunStatus = RunStatus.CERTIFIED,
    ) -> int:
        """
        Store one run and its certificates.

        Args:
            command:      CLI command name.
            arguments:    JSON-serializable run arguments.
            certificates: Mappings with any of CERTIFICATE_FIELDS.

        Returns:
            The new run id.
        """
        with self.get_session() as session:
            run = Run(
                command=command,
                arguments=json.dumps(dict(arguments), sort_keys=True, default=str),
                seed=seed,
                log_base=log_base,
                status=status,
            )
            for i, cert in enumerate(certificates):
                run.certificates.append(Certificate(
                    row_index=i,
                    label=cert.get("label"),
                    beta=_float_or_none(cert.get("beta")),
                    dh=_float_or_none(cert.get("dh")),
                    threshold=_float_or_none(cert.get("threshold")),
                    mixing=_float_or_none(cert.get("mixing")),
                    dual_value=_float_or_none(cert.get("dual_value")),
                    gap=_float_or_none(cert.get("gap")),
                    certified=bool(cert.get("certified", True)),
                ))
            session.add(run)
            session.flush()
            run_id = run.id
        self.logger.info(f"archived run {run_id} ({command})")
        return run_id

    def runs(self, command: Optional[str] = None) -> List[Run]:
        with self.get_session() as session:
            query = select(Run).order_by(Run.id)
            if command is not None:
                query = query.where(Run.command == command)
            return list(session.scalars(query))

    def certificates_for(self, run_id: int) -> List[Certificate]:
        with self.get_session() as session:
            query = select(Certificate).where(Certificate.run_id == run_id).order_by(Certificate.row_index)
            return list(session.scalars(query))

    def dispose(self) -> None:
        self.Session.remove()
        self.engine.dispose()
