"""Verification reports and the exception hierarchy."""

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple = ()
    detail: str = ""

    def to_dict(self):
        return {"axiom": self.axiom, "witness": _plain(self.witness), "detail": self.detail}


@dataclass
class Report:
    """Outcome of a verifier: ``valid`` iff no violation was recorded."""

    kind: str
    violations: list = field(default_factory=list)

    @property
    def valid(self):
        return not self.violations

    def add(self, axiom, witness=(), detail=""):
        self.violations.append(Violation(axiom, tuple(witness), detail))

    def extend(self, other, prefix=""):
        for v in other.violations:
            self.violations.append(Violation(prefix + v.axiom, v.witness, v.detail))

    def axioms(self):
        return sorted({v.axiom for v in self.violations})

    def to_dict(self):
        return {
            "kind": self.kind,
            "valid": self.valid,
            "violations": [v.to_dict() for v in self.violations],
        }


def _plain(obj):
    if isinstance(obj, (tuple, list)):
        return [_plain(o) for o in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(_plain(o) for o in obj)
    if hasattr(obj, "item"):
        return obj.item()
    return obj


class GermoidError(Exception):
    """Base class; ``witness`` carries whatever object falsified a precondition."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class InvalidStructure(GermoidError):
    def __init__(self, report):
        first = report.violations[0] if report.violations else None
        msg = f"invalid {report.kind}"
        if first is not None:
            msg += f": {first.axiom} {first.witness}"
        super().__init__(msg, witness=first)
        self.report = report


class PreconditionError(GermoidError):
    pass


class SizeGuardError(GermoidError):
    pass


class IncompatibleSetError(GermoidError):
    pass


class NotWideError(PreconditionError):
    pass


class NotUnitalError(PreconditionError):
    pass


class FactorizationError(GermoidError):
    pass


class NonCommutingSquareError(FactorizationError):
    pass


class HypothesisViolatedError(FactorizationError):
    pass


class CharacterizationMismatch(GermoidError):
    """Raised when two equivalent characterizations disagree (an internal bug)."""


class ParseError(GermoidError):
    """Malformed or schema-invalid structure file."""
