"""Database Models for the results archive using SQLAlchemy

A run is one CLI invocation; each certified hypothesis-test solve it emitted
is stored as a certificate row, so archived runs double as regression
fixtures.
"""
from datetime import datetime
from sqlalchemy import Column, Integer, String, Float, DateTime, ForeignKey, Enum as SQLEnum, Text, Boolean
from sqlalchemy.orm import declarative_base, relationship
import enum

Base = declarative_base()


class RunStatus(enum.Enum):
    """Outcome of an archived run."""
    CERTIFIED = "certified"
    FAILED = "failed"


class Run(Base):
    """One command invocation with its arguments."""
    __tablename__ = 'runs'

    id = Column(Integer, primary_key=True)
    command = Column(String(50), nullable=False, index=True)
    arguments = Column(Text, nullable=False)        # JSON
    seed = Column(Integer, nullable=True)
    log_base = Column(String(10), nullable=False, default="bits")
    status = Column(SQLEnum(RunStatus), default=RunStatus.CERTIFIED, index=True)
    created_at = Column(DateTime, default=datetime.utcnow)

    certificates = relationship('Certificate', back_populates='run', cascade='all, delete-orphan',
                                order_by='Certificate.row_index')

    def __repr__(self):
        return f"<Run id={self.id} command={self.command} status={self.status}>"


class Certificate(Base):
    """Primal/dual record of one solve."""
    __tablename__ = 'certificates'

    id = Column(Integer, primary_key=True)
    run_id = Column(Integer, ForeignKey('runs.id'), nullable=False, index=True)
    row_index = Column(Integer, nullable=False)
    label = Column(String(100))                      # e.g. "n=3" or "converse"

    beta = Column(Float)
    dh = Column(Float)
    threshold = Column(Float)
    mixing = Column(Float)
    dual_value = Column(Float)
    gap = Column(Float)
    certified = Column(Boolean, default=True)

    run = relationship('Run', back_populates='certificates')

    def __repr__(self):
        return f"<Certificate run={self.run_id} row={self.row_index} dh={self.dh} gap={self.gap}>"
