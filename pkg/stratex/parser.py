"""Template parser - DSL text to StrategyTemplate, and expression decomposition.

Grammar (LL(1), recursive descent with one-token lookahead):

    template := ("acceptance"|"bidding") "template" STRING "{" phase+ "}"
    phase    := "phase" interval "{" (acceptRule | bidRule+) "}"
    interval := "[" NUMBER "," NUMBER (")"|"]")
    acceptRule := "accept" "if" "U(offer)" ">=" expr
    bidRule  := "bid" tactic ["off"]
    tactic   := "boulware" ["(" params ")"] | "pareto" "(" linear ")"
              | "opponent_greedy" | "random_above_threshold"
    expr     := "max" "(" expr ("," expr)+ ")" | "Q" "(" linear ")"
              | "u_dyn" | "u_fixed" | "U(next_own)" | NUMBER
    linear   := NUMBER "*" "t" [("+"|"-") NUMBER] | NUMBER

`#` starts a comment that runs to the end of the line.
"""

import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .template import (
    ACCEPTANCE_FUNCTIONS,
    Boulware,
    Choice,
    Comparison,
    Constant,
    DynamicThreshold,
    FixedThreshold,
    FunctionApp,
    Implication,
    Interval,
    MathExpr,
    OpponentGreedy,
    OwnNextBidUtility,
    ParetoWeighted,
    Phase,
    Product,
    QuantileConcession,
    RandomAboveThreshold,
    StrategyTemplate,
    StructureError,
    Sum,
    Symbol,
    TemplateError,
    TemplateKind,
    TimeSymbol,
    phase_expr,
    tiling_problem,
    walk_expr,
)

DEFAULT_U_FIXED = 0.6


class TemplateSyntaxError(TemplateError):
    """Unexpected token while parsing template text."""

    def __init__(self, span: tuple[int, int], expected: str, found: str):
        self.span = span
        self.expected = expected
        self.found = found
        super().__init__(
            f"line {span[0]}, column {span[1]}: expected {expected}, found {found}"
        )


# --- Tokens ---


class TokenKind(str, Enum):
    NUMBER = "Number"
    IDENTIFIER = "Identifier"
    KEYWORD = "Keyword"
    PUNCT = "Punct"
    INTERVAL_BRACKET = "IntervalBracket"
    STRING = "String"
    EOF = "EOF"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    lexeme: str
    span: tuple[int, int]  # (line, column), 1-based

    def describe(self) -> str:
        if self.kind == TokenKind.EOF:
            return "end of input"
        return f"'{self.lexeme}'"


KEYWORDS = {"acceptance", "bidding", "template", "phase", "accept", "if", "bid", "off"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<number>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<punct>>=|[{}(),*+=-])
  | (?P<bracket>[\[\]])
    """,
    re.VERBOSE,
)


def tokenize(source: str) -> list[Token]:
    """Split source into tokens; raises TemplateSyntaxError on stray characters."""
    source = source.replace("−", "-").replace("≥", ">=")
    tokens: list[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(source):
        match = _TOKEN_RE.match(source, pos)
        span = (line, pos - line_start + 1)
        if match is None:
            raise TemplateSyntaxError(span, "a token", f"'{source[pos]}'")
        group = match.lastgroup
        text = match.group()
        if group == "number":
            tokens.append(Token(TokenKind.NUMBER, text, span))
        elif group == "string":
            tokens.append(Token(TokenKind.STRING, text, span))
        elif group == "name":
            kind = TokenKind.KEYWORD if text in KEYWORDS else TokenKind.IDENTIFIER
            tokens.append(Token(kind, text, span))
        elif group == "punct":
            tokens.append(Token(TokenKind.PUNCT, text, span))
        elif group == "bracket":
            tokens.append(Token(TokenKind.INTERVAL_BRACKET, text, span))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = match.end()
    tokens.append(Token(TokenKind.EOF, "", _end_span(source)))
    return tokens


def _end_span(source: str) -> tuple[int, int]:
    """Span of the last character (EOF errors still point inside the source)."""
    stripped = source.rstrip()
    if not stripped:
        return (1, 1)
    line = stripped.count("\n") + 1
    column = len(stripped) - (stripped.rfind("\n") + 1)
    return (line, column)


def _unquote(lexeme: str) -> str:
    return re.sub(r"\\(.)", r"\1", lexeme[1:-1])


# --- Parser ---


class Parser:
    """Recursive-descent parser over a token list."""

    def __init__(self, tokens: list[Token], u_fixed: float = DEFAULT_U_FIXED):
        self._tokens = tokens
        self._pos = 0
        self._u_fixed = u_fixed

    # -- token helpers --

    @property
    def _peek(self) -> Token:
        return self._tokens[self._pos]

    def _advance(self) -> Token:
        token = self._tokens[self._pos]
        if token.kind != TokenKind.EOF:
            self._pos += 1
        return token

    def _at(self, lexeme: str) -> bool:
        token = self._peek
        return token.lexeme == lexeme and token.kind not in (
            TokenKind.STRING,
            TokenKind.NUMBER,
        )

    def _expect(self, lexeme: str) -> Token:
        if not self._at(lexeme):
            raise TemplateSyntaxError(self._peek.span, f"'{lexeme}'", self._peek.describe())
        return self._advance()

    def _expect_kind(self, kind: TokenKind, expected: str) -> Token:
        if self._peek.kind != kind:
            raise TemplateSyntaxError(self._peek.span, expected, self._peek.describe())
        return self._advance()

    def _number(self) -> tuple[float, tuple[int, int]]:
        span = self._peek.span
        sign = 1.0
        if self._at("-"):
            self._advance()
            sign = -1.0
        token = self._expect_kind(TokenKind.NUMBER, "a number")
        return sign * float(token.lexeme), span

    # -- grammar --

    def parse(self) -> StrategyTemplate:
        kind_token = self._peek
        if not (self._at("acceptance") or self._at("bidding")):
            raise TemplateSyntaxError(
                kind_token.span, "'acceptance' or 'bidding'", kind_token.describe()
            )
        kind = TemplateKind(self._advance().lexeme)
        self._expect("template")
        name = _unquote(self._expect_kind(TokenKind.STRING, "a quoted name").lexeme)
        self._expect("{")

        phases: list[Phase] = []
        spans: list[tuple[int, int]] = []
        closers: list[str] = []
        while self._at("phase"):
            span = self._peek.span
            phase, closer = self._phase(kind)
            phases.append(phase)
            spans.append(span)
            closers.append(closer)
        if not phases:
            raise TemplateSyntaxError(self._peek.span, "'phase'", self._peek.describe())
        self._expect("}")
        self._expect_kind(TokenKind.EOF, "end of input")

        problem = tiling_problem([(p.t_start, p.t_end) for p in phases])
        if problem:
            raise StructureError(problem[1], spans[problem[0]])
        for index, closer in enumerate(closers):
            final = index == len(phases) - 1
            if final and closer != "]":
                raise StructureError("final phase must be closed with ']'", spans[index])
            if not final and closer != ")":
                raise StructureError(
                    "only the final phase may be closed with ']'", spans[index]
                )
        return StrategyTemplate(kind, name, tuple(phases))

    def _phase(self, kind: TemplateKind) -> tuple[Phase, str]:
        phase_span = self._expect("phase").span
        start, end, closer = self._interval()
        self._expect("{")
        if kind == TemplateKind.ACCEPTANCE:
            tactics = self._accept_rule()
        else:
            tactics = self._bid_rules()
        self._expect("}")
        try:
            phase = Phase(start, end, tuple(tactics))
        except StructureError as e:
            raise StructureError(e.message, phase_span) from e
        return phase, closer

    def _interval(self) -> tuple[float, float, str]:
        self._expect("[")
        start, _ = self._number()
        self._expect(",")
        end, _ = self._number()
        token = self._peek
        if token.lexeme not in (")", "]") or token.kind == TokenKind.STRING:
            raise TemplateSyntaxError(token.span, "')' or ']'", token.describe())
        self._advance()
        return start, end, token.lexeme

    def _accept_rule(self) -> list:
        rule_span = self._expect("accept").span
        self._expect("if")
        self._expect("U")
        self._expect("(")
        self._expect("offer")
        self._expect(")")
        self._expect(">=")
        tactics = self._expr()
        if self._at("accept"):
            raise StructureError("a phase holds exactly one accept rule", self._peek.span)
        if len(set(tactics)) != len(tactics):
            raise StructureError("duplicate acceptance tactic in phase", rule_span)
        return tactics

    def _expr(self) -> list:
        """An acceptance expression, flattened into its tactic list."""
        token = self._peek
        if self._at("max"):
            self._advance()
            self._expect("(")
            tactics = self._expr()
            self._expect(",")
            tactics += self._expr()
            while self._at(","):
                self._advance()
                tactics += self._expr()
            self._expect(")")
            return tactics
        if self._at("Q"):
            self._advance()
            self._expect("(")
            a, b = self._linear()
            self._expect(")")
            return [QuantileConcession(a, b)]
        if self._at("u_dyn"):
            self._advance()
            return [DynamicThreshold()]
        if self._at("u_fixed"):
            self._advance()
            return [FixedThreshold(self._u_fixed, symbolic=True)]
        if self._at("U"):
            self._advance()
            self._expect("(")
            self._expect("next_own")
            self._expect(")")
            return [OwnNextBidUtility()]
        if token.kind == TokenKind.NUMBER or self._at("-"):
            value, span = self._number()
            try:
                return [FixedThreshold(value)]
            except StructureError as e:
                raise StructureError(e.message, span) from e
        raise TemplateSyntaxError(
            token.span,
            "'max', 'Q', 'u_dyn', 'u_fixed', 'U(next_own)' or a number",
            token.describe(),
        )

    def _linear(self) -> tuple[float, float]:
        first, _ = self._number()
        if not self._at("*"):
            return 0.0, first
        self._advance()
        self._expect("t")
        if self._at("+"):
            self._advance()
            intercept, _ = self._number()
            return first, intercept
        if self._at("-"):
            self._advance()
            intercept, _ = self._number()
            return first, -intercept
        return first, 0.0

    def _bid_rules(self) -> list:
        if not self._at("bid"):
            raise TemplateSyntaxError(self._peek.span, "'bid'", self._peek.describe())
        tactics = []
        while self._at("bid"):
            self._advance()
            tactics.append(self._tactic())
        return tactics

    def _tactic(self):
        token = self._peek
        if self._at("boulware"):
            self._advance()
            params = self._params() if self._at("(") else {}
            selected = self._selection()
            try:
                return Boulware(**params, selected=selected)
            except StructureError as e:
                raise StructureError(e.message, token.span) from e
        if self._at("pareto"):
            self._advance()
            self._expect("(")
            a, b = self._linear()
            self._expect(")")
            return ParetoWeighted(a, b, selected=self._selection())
        if self._at("opponent_greedy"):
            self._advance()
            return OpponentGreedy(selected=self._selection())
        if self._at("random_above_threshold"):
            self._advance()
            return RandomAboveThreshold(selected=self._selection())
        raise TemplateSyntaxError(
            token.span,
            "'boulware', 'pareto', 'opponent_greedy' or 'random_above_threshold'",
            token.describe(),
        )

    def _params(self) -> dict[str, float]:
        self._expect("(")
        params: dict[str, float] = {}
        while True:
            token = self._peek
            if token.lexeme not in ("e", "u_min", "u_max") or token.kind != TokenKind.IDENTIFIER:
                raise TemplateSyntaxError(
                    token.span, "'e', 'u_min' or 'u_max'", token.describe()
                )
            if token.lexeme in params:
                raise StructureError(f"parameter '{token.lexeme}' given twice", token.span)
            self._advance()
            self._expect("=")
            params[token.lexeme], _ = self._number()
            if not self._at(","):
                break
            self._advance()
        self._expect(")")
        return params

    def _selection(self) -> bool:
        if self._at("off"):
            self._advance()
            return False
        return True


def parse_template(source: str, *, u_fixed: float = DEFAULT_U_FIXED) -> StrategyTemplate:
    """Parse DSL text into a validated StrategyTemplate.

    Args:
        source: Template text
        u_fixed: Value given to the symbolic fixed threshold `u_fixed`

    Raises:
        TemplateSyntaxError: On unexpected tokens
        StructureError: On non-tiling phases, empty tactic lists, out-of-range constants
    """
    return Parser(tokenize(source), u_fixed=u_fixed).parse()


# --- Decomposition ---


@dataclass(frozen=True)
class ParsedUnits:
    """(V, C, F, O, Structure) of one expression."""

    variables: frozenset
    constants: frozenset
    functions: frozenset
    operators: frozenset
    structure: MathExpr


_OPERATORS = {
    Sum: "+",
    Product: "·",
    Comparison: "≥",
    Interval: "∈",
    Implication: "→",
    Choice: "|",
}


def _function_label(name: str) -> str:
    return "U" if name in ("U_own", "U_est") else name


def decompose(expr: MathExpr) -> ParsedUnits:
    """Sort every node of an expression into variables, constants, functions, operators."""
    variables: set[str] = set()
    constants: set[float] = set()
    functions: set[str] = set()
    operators: set[str] = set()
    for _, node in walk_expr(expr):
        if isinstance(node, Constant):
            constants.add(node.value)
        elif isinstance(node, TimeSymbol):
            variables.add("t")
        elif isinstance(node, Symbol):
            variables.add(node.name)
        elif isinstance(node, FunctionApp):
            label = _function_label(node.name)
            functions.add(label)
            if node.name in ACCEPTANCE_FUNCTIONS and label == "U":
                operand = node.args[0]
                variables.add(f"U({operand.name})" if isinstance(operand, Symbol) else "U")
        else:
            operators.add(_OPERATORS[type(node)])
            if isinstance(node, Interval):
                variables.add("t")
    return ParsedUnits(
        frozenset(variables),
        frozenset(constants),
        frozenset(functions),
        frozenset(operators),
        expr,
    )


def decompose_template(template: StrategyTemplate) -> list[ParsedUnits]:
    """One ParsedUnits per phase rule."""
    return [decompose(phase_expr(template, i)) for i in range(len(template.phases))]


def template_constants(template: StrategyTemplate) -> set[float]:
    found: set[float] = set()
    for units in decompose_template(template):
        found |= units.constants
    return found


def parse_file(path, *, u_fixed: float = DEFAULT_U_FIXED) -> StrategyTemplate:
    """Parse a .nst file."""
    return parse_template(Path(path).read_text(encoding="utf-8"), u_fixed=u_fixed)
