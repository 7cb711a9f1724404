from __future__ import annotations


class PddlError(Exception):
    """Base class for planning-file errors.

    ``code`` is a stable machine-readable tag; the harness maps it onto its
    failure taxonomy.
    """

    code = "PDDL_ERROR"

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.message = message
        self.line = line
        self.col = col
        where = f" (line {line}, col {col})" if line is not None else ""
        super().__init__(f"{message}{where}")


class PddlSyntaxError(PddlError):
    code = "SYNTAX_ERROR"


class PddlSemanticError(PddlError):
    """Well-formed text that violates declarations (arity, types, names)."""

    code = "SEMANTIC_ERROR"


class UndeclaredPredicateError(PddlSemanticError):
    code = "UNDECLARED_PREDICATE"

    def __init__(self, predicate: str, line: int | None = None, col: int | None = None):
        self.predicate = predicate
        super().__init__(f"undeclared predicate {predicate!r}", line, col)


class UndeclaredItemError(PddlSemanticError):
    code = "UNDECLARED_ITEM"

    def __init__(self, names, line: int | None = None, col: int | None = None):
        self.names = tuple(sorted(set(names)))
        super().__init__(f"undeclared object(s): {', '.join(self.names)}", line, col)


class UnsupportedFeatureError(PddlError):
    code = "UNSUPPORTED"
