"""Parser for domain and problem files in the typed STRIPS fragment.

Supported requirements are ``:strips``, ``:typing`` and
``:negative-preconditions``; anything else is rejected with a location.
"""

from __future__ import annotations

from .ast import (
    ROOT_TYPE,
    SUPPORTED_REQUIREMENTS,
    ActionSchema,
    Atom,
    DomainAst,
    GoalFormula,
    Literal,
    PredicateDecl,
    ProblemAst,
    TypedName,
)
from .errors import (
    PddlSemanticError,
    PddlSyntaxError,
    UndeclaredItemError,
    UndeclaredPredicateError,
    UnsupportedFeatureError,
)
from .sexpr import SList, Token, read

_UNSUPPORTED_SECTIONS = {
    ":functions": "numeric fluents",
    ":derived": "derived predicates",
    ":durative-action": "durative actions",
    ":constraints": "constraints",
    ":metric": "plan metrics",
    ":timed-initial-literals": "timed initial literals",
}
_UNSUPPORTED_CONNECTIVES = {"or", "imply", "forall", "exists", "when", "=", "increase", "decrease", "either"}


def _loc(node) -> tuple[int, int]:
    return node.line, node.col


def _expect_list(node, what: str) -> SList:
    if not isinstance(node, SList):
        raise PddlSyntaxError(f"expected {what}, found {node.text!r}", *_loc(node))
    return node


def _expect_name(node, what: str) -> str:
    if not isinstance(node, Token) or node.text in "()" or node.text.startswith(":"):
        raise PddlSyntaxError(f"expected {what}", *_loc(node))
    return node.text


def _parse_typed_list(items, what: str, variables: bool) -> list[tuple[TypedName, Token]]:
    """Parse ``a b - t c`` style lists; untyped names default to ``object``."""
    out: list[tuple[TypedName, Token]] = []
    pending: list[Token] = []
    i = 0
    while i < len(items):
        node = items[i]
        if isinstance(node, SList):
            head = node.head()
            if head == "either":
                raise UnsupportedFeatureError("'either' types are not supported", *_loc(node))
            raise PddlSyntaxError(f"unexpected list in {what}", *_loc(node))
        if node.text == "-":
            if not pending:
                raise PddlSyntaxError(f"dangling '-' in {what}", *_loc(node))
            if i + 1 >= len(items):
                raise PddlSyntaxError(f"missing type after '-' in {what}", *_loc(node))
            tnode = items[i + 1]
            if isinstance(tnode, SList):
                if tnode.head() == "either":
                    raise UnsupportedFeatureError("'either' types are not supported", *_loc(tnode))
                raise PddlSyntaxError(f"expected type name in {what}", *_loc(tnode))
            for tok in pending:
                out.append((TypedName(tok.text, tnode.text), tok))
            pending = []
            i += 2
            continue
        if variables and not node.text.startswith("?"):
            raise PddlSyntaxError(f"expected variable in {what}, found {node.text!r}", *_loc(node))
        if not variables and node.text.startswith("?"):
            raise PddlSyntaxError(f"unexpected variable {node.text!r} in {what}", *_loc(node))
        pending.append(node)
        i += 1
    for tok in pending:
        out.append((TypedName(tok.text, ROOT_TYPE), tok))
    return out


def _parse_atom(node: SList) -> Atom:
    if not len(node):
        raise PddlSyntaxError("empty atom", *_loc(node))
    head = node[0]
    if not isinstance(head, Token):
        raise PddlSyntaxError("atom must start with a predicate name", *_loc(node))
    if head.text in _UNSUPPORTED_CONNECTIVES:
        raise UnsupportedFeatureError(f"'{head.text}' is not supported", *_loc(node))
    args = []
    for arg in node.items[1:]:
        if isinstance(arg, SList):
            raise PddlSyntaxError(f"nested term in atom ({head.text} ...)", *_loc(arg))
        args.append(arg.text)
    return Atom(head.text, tuple(args))


def _parse_literal(node) -> Literal:
    node = _expect_list(node, "literal")
    if node.head() == "not":
        if len(node) != 2:
            raise PddlSyntaxError("'not' takes exactly one argument", *_loc(node))
        inner = _expect_list(node[1], "atom inside 'not'")
        if inner.head() == "not":
            raise UnsupportedFeatureError("nested negation is not supported", *_loc(inner))
        if inner.head() == "and":
            raise UnsupportedFeatureError("negated conjunctions are not supported", *_loc(inner))
        return Literal(_parse_atom(inner), False)
    if node.head() == "and":
        raise PddlSyntaxError("nested 'and' is not allowed here", *_loc(node))
    return Literal(_parse_atom(node), True)


def _parse_conjunction(node) -> list[tuple[Literal, SList]]:
    node = _expect_list(node, "formula")
    if not len(node):
        return []
    if node.head() == "and":
        out = []
        for child in node.items[1:]:
            child = _expect_list(child, "literal")
            if child.head() == "and":
                out.extend(_parse_conjunction(child))
            else:
                out.append((_parse_literal(child), child))
        return out
    return [(_parse_literal(node), node)]


class _DomainChecker:
    def __init__(self, domain_name: str, types, predicates):
        self.types = types
        self.type_names = {ROOT_TYPE} | {t.name for t in types} | {t.type for t in types}
        self.predicates = predicates
        self._probe = DomainAst(domain_name, types=tuple(types))

    def check_type(self, tname: str, node) -> None:
        if tname not in self.type_names:
            raise PddlSemanticError(f"undeclared type {tname!r}", *_loc(node))

    def check_atom(self, atom: Atom, node, var_types: dict[str, str]) -> None:
        decl = self.predicates.get(atom.predicate)
        if decl is None:
            raise UndeclaredPredicateError(atom.predicate, *_loc(node))
        if len(atom.args) != decl.arity:
            raise PddlSemanticError(
                f"predicate {atom.predicate!r} expects {decl.arity} argument(s), got {len(atom.args)}", *_loc(node)
            )
        for arg, param in zip(atom.args, decl.params):
            if arg not in var_types:
                if arg.startswith("?"):
                    raise PddlSemanticError(f"free variable {arg!r} in ({atom.predicate} ...)", *_loc(node))
                raise PddlSemanticError(f"unknown constant {arg!r} in ({atom.predicate} ...)", *_loc(node))
            if not self._probe.compatible(var_types[arg], param.type):
                raise PddlSemanticError(
                    f"argument {arg!r} of type {var_types[arg]!r} does not match {param.type!r} in {atom.predicate}",
                    *_loc(node),
                )


def _section_name(section: SList) -> str:
    head = section.head()
    if head is None:
        raise PddlSyntaxError("expected a section keyword", *_loc(section))
    return head


def parse_domain(text: str) -> DomainAst:
    root = read(text)
    if root.head() != "define" or len(root) < 2:
        raise PddlSyntaxError("expected (define (domain <name>) ...)", *_loc(root))
    header = _expect_list(root[1], "(domain <name>)")
    if header.head() != "domain" or len(header) != 2:
        if header.head() == "problem":
            raise PddlSyntaxError("expected a domain file, found a problem file", *_loc(header))
        raise PddlSyntaxError("expected (domain <name>)", *_loc(header))
    name = _expect_name(header[1], "domain name")

    requirements: list[str] = []
    types: list[TypedName] = []
    constants_raw: list[tuple[TypedName, Token]] = []
    predicates: dict[str, PredicateDecl] = {}
    predicate_nodes: list = []
    action_nodes: list[SList] = []
    seen_sections: set[str] = set()

    for section in root.items[2:]:
        section = _expect_list(section, "domain section")
        key = _section_name(section)
        if key in _UNSUPPORTED_SECTIONS:
            raise UnsupportedFeatureError(f"{_UNSUPPORTED_SECTIONS[key]} ({key}) are not supported", *_loc(section))
        if key == ":action":
            action_nodes.append(section)
            continue
        if key in seen_sections:
            raise PddlSyntaxError(f"duplicate section {key}", *_loc(section))
        seen_sections.add(key)
        if key == ":requirements":
            for tok in section.items[1:]:
                if isinstance(tok, SList) or not tok.text.startswith(":"):
                    raise PddlSyntaxError("malformed requirement flag", *_loc(tok))
                if tok.text not in SUPPORTED_REQUIREMENTS:
                    raise UnsupportedFeatureError(f"unsupported requirement {tok.text}", *_loc(tok))
                if tok.text not in requirements:
                    requirements.append(tok.text)
        elif key == ":types":
            seen_types = set()
            for tn, tok in _parse_typed_list(section.items[1:], ":types", variables=False):
                if tn.name in seen_types:
                    raise PddlSemanticError(f"duplicate type {tn.name!r}", *_loc(tok))
                seen_types.add(tn.name)
                types.append(tn)
        elif key == ":constants":
            constants_raw = _parse_typed_list(section.items[1:], ":constants", variables=False)
        elif key == ":predicates":
            predicate_nodes = section.items[1:]
        else:
            raise PddlSyntaxError(f"unknown domain section {key}", *_loc(section))

    type_names = {ROOT_TYPE} | {t.name for t in types}
    for t in types:
        if t.type not in type_names:
            raise PddlSemanticError(f"supertype {t.type!r} of {t.name!r} is not declared")
    probe = DomainAst(name, types=tuple(types))
    for t in types:
        if t.name in probe.ancestors(t.type):
            raise PddlSemanticError(f"cyclic type hierarchy at {t.name!r}")

    for node in predicate_nodes:
        node = _expect_list(node, "predicate declaration")
        pname = _expect_name(node[0], "predicate name") if len(node) else None
        if pname is None:
            raise PddlSyntaxError("empty predicate declaration", *_loc(node))
        if pname in predicates:
            raise PddlSemanticError(f"duplicate predicate {pname!r}", *_loc(node))
        params = _parse_typed_list(node.items[1:], f"predicate {pname}", variables=True)
        for tn, tok in params:
            if tn.type not in type_names:
                raise PddlSemanticError(f"undeclared type {tn.type!r}", *_loc(tok))
        predicates[pname] = PredicateDecl(pname, tuple(tn for tn, _ in params))

    constants = []
    for tn, tok in constants_raw:
        if tn.type not in type_names:
            raise PddlSemanticError(f"undeclared type {tn.type!r}", *_loc(tok))
        constants.append(tn)

    checker = _DomainChecker(name, types, predicates)
    actions: list[ActionSchema] = []
    action_names: set[str] = set()
    for node in action_nodes:
        action = _parse_action(node, checker, {c.name: c.type for c in constants})
        if action.name in action_names:
            raise PddlSemanticError(f"duplicate action {action.name!r}", *_loc(node))
        action_names.add(action.name)
        actions.append(action)

    return DomainAst(
        name=name,
        requirements=tuple(requirements),
        types=tuple(types),
        constants=tuple(constants),
        predicates=tuple(predicates.values()),
        actions=tuple(actions),
    )


def _parse_action(node: SList, checker: _DomainChecker, constants: dict[str, str]) -> ActionSchema:
    if len(node) < 2:
        raise PddlSyntaxError("action without a name", *_loc(node))
    name = _expect_name(node[1], "action name")
    fields: dict[str, object] = {}
    i = 2
    while i < len(node):
        key_tok = node[i]
        if not isinstance(key_tok, Token) or not key_tok.text.startswith(":"):
            raise PddlSyntaxError(f"expected a keyword in action {name}", *_loc(key_tok))
        key = key_tok.text
        if key not in (":parameters", ":precondition", ":effect"):
            raise UnsupportedFeatureError(f"unsupported action field {key} in {name}", *_loc(key_tok))
        if key in fields:
            raise PddlSyntaxError(f"duplicate {key} in action {name}", *_loc(key_tok))
        if i + 1 >= len(node):
            raise PddlSyntaxError(f"missing value for {key} in action {name}", *_loc(key_tok))
        fields[key] = node[i + 1]
        i += 2

    params: list[TypedName] = []
    var_types = dict(constants)
    if ":parameters" in fields:
        plist = _expect_list(fields[":parameters"], "parameter list")
        for tn, tok in _parse_typed_list(plist.items, f"parameters of {name}", variables=True):
            checker.check_type(tn.type, tok)
            if tn.name in var_types:
                raise PddlSemanticError(f"duplicate parameter {tn.name!r} in {name}", *_loc(tok))
            var_types[tn.name] = tn.type
            params.append(tn)

    precondition: list[Literal] = []
    if ":precondition" in fields:
        for lit, lnode in _parse_conjunction(fields[":precondition"]):
            checker.check_atom(lit.atom, lnode, var_types)
            if lit not in precondition:
                precondition.append(lit)

    adds: list[Atom] = []
    dels: list[Atom] = []
    if ":effect" in fields:
        for lit, lnode in _parse_conjunction(fields[":effect"]):
            checker.check_atom(lit.atom, lnode, var_types)
            target = adds if lit.positive else dels
            if lit.atom not in target:
                target.append(lit.atom)
    both = set(adds) & set(dels)
    if both:
        raise PddlSemanticError(
            f"action {name} both adds and deletes {', '.join(sorted(map(str, both)))}", *_loc(node)
        )
    return ActionSchema(name, tuple(params), tuple(precondition), tuple(adds), tuple(dels))


def parse_problem(text: str, domain: DomainAst) -> ProblemAst:
    root = read(text)
    if root.head() != "define" or len(root) < 2:
        raise PddlSyntaxError("expected (define (problem <name>) ...)", *_loc(root))
    header = _expect_list(root[1], "(problem <name>)")
    if header.head() != "problem" or len(header) != 2:
        if header.head() == "domain":
            raise PddlSyntaxError("expected a problem file, found a domain file", *_loc(header))
        raise PddlSyntaxError("expected (problem <name>)", *_loc(header))
    name = _expect_name(header[1], "problem name")

    domain_name = None
    objects_raw: list[tuple[TypedName, Token]] = []
    init_nodes: list = []
    goal_node = None
    seen: set[str] = set()
    for section in root.items[2:]:
        section = _expect_list(section, "problem section")
        key = _section_name(section)
        if key in _UNSUPPORTED_SECTIONS:
            raise UnsupportedFeatureError(f"{_UNSUPPORTED_SECTIONS[key]} ({key}) are not supported", *_loc(section))
        if key in seen:
            raise PddlSyntaxError(f"duplicate section {key}", *_loc(section))
        seen.add(key)
        if key == ":domain":
            if len(section) != 2:
                raise PddlSyntaxError("expected (:domain <name>)", *_loc(section))
            domain_name = _expect_name(section[1], "domain name")
        elif key == ":requirements":
            for tok in section.items[1:]:
                if isinstance(tok, SList) or tok.text not in SUPPORTED_REQUIREMENTS:
                    raise UnsupportedFeatureError("unsupported requirement in problem", *_loc(tok))
        elif key == ":objects":
            objects_raw = _parse_typed_list(section.items[1:], ":objects", variables=False)
        elif key == ":init":
            init_nodes = section.items[1:]
        elif key == ":goal":
            if len(section) > 2:
                raise PddlSyntaxError("(:goal ...) takes a single formula", *_loc(section))
            goal_node = section[1] if len(section) == 2 else SList([], section.line, section.col)
        else:
            raise PddlSyntaxError(f"unknown problem section {key}", *_loc(section))

    if domain_name is None:
        raise PddlSyntaxError("problem lacks (:domain <name>)", *_loc(root))
    if domain_name != domain.name:
        raise PddlSemanticError(f"problem is for domain {domain_name!r}, not {domain.name!r}", *_loc(root))

    objects: list[TypedName] = []
    obj_types: dict[str, str] = {c.name: c.type for c in domain.constants}
    for tn, tok in objects_raw:
        if tn.type not in domain.type_names:
            raise PddlSemanticError(f"object {tn.name!r} has undeclared type {tn.type!r}", *_loc(tok))
        if tn.name in obj_types:
            raise PddlSemanticError(f"duplicate object {tn.name!r}", *_loc(tok))
        obj_types[tn.name] = tn.type
        objects.append(tn)

    init_atoms: list[tuple[Atom, SList]] = []
    for node in init_nodes:
        node = _expect_list(node, "initial fact")
        if node.head() == "not":
            raise PddlSyntaxError("negative literals are not allowed in :init", *_loc(node))
        if node.head() == "and":
            raise PddlSyntaxError("'and' is not allowed in :init", *_loc(node))
        init_atoms.append((_parse_atom(node), node))
    goal_lits = _parse_conjunction(goal_node) if goal_node is not None else []

    # Undeclared objects are reported before any other semantic problem.
    missing: set[str] = set()
    first_missing = None
    for atom, node in init_atoms + [(l.atom, n) for l, n in goal_lits]:
        for arg in atom.args:
            if arg.startswith("?"):
                raise PddlSemanticError(f"variable {arg!r} in ground formula", *_loc(node))
            if arg not in obj_types:
                missing.add(arg)
                first_missing = first_missing or node
    if missing:
        raise UndeclaredItemError(missing, *_loc(first_missing))

    checker = _DomainChecker(domain.name, domain.types, domain.predicate_map)
    init: list[Atom] = []
    seen_init: set[Atom] = set()
    for atom, node in init_atoms:
        checker.check_atom(atom, node, obj_types)
        if atom not in seen_init:
            seen_init.add(atom)
            init.append(atom)
    goal: list[Literal] = []
    for lit, node in goal_lits:
        checker.check_atom(lit.atom, node, obj_types)
        if lit not in goal:
            goal.append(lit)
    return ProblemAst(name, domain_name, tuple(objects), tuple(init), GoalFormula(tuple(goal)))


def parse_goal(text: str, domain: DomainAst, problem: ProblemAst) -> GoalFormula:
    """Parse a standalone goal, either ``(:goal F)`` or a bare conjunction."""
    node = read(text)
    if node.head() == ":goal":
        if len(node) != 2:
            raise PddlSyntaxError("(:goal ...) takes a single formula", *_loc(node))
        node = node[1]
    lits = _parse_conjunction(node)
    obj_types = {c.name: c.type for c in domain.constants}
    obj_types.update(problem.object_types)
    missing = {a for lit, _ in lits for a in lit.atom.args if a not in obj_types}
    if missing:
        raise UndeclaredItemError(missing, *_loc(node))
    checker = _DomainChecker(domain.name, domain.types, domain.predicate_map)
    out: list[Literal] = []
    for lit, lnode in lits:
        checker.check_atom(lit.atom, lnode, obj_types)
        if lit not in out:
            out.append(lit)
    return GoalFormula(tuple(out))
