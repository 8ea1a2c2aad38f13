"""Recursive-descent parser for `.prv` property scripts.

Concrete syntax (canonical form; see printer.py for what we emit):

    components label, label;                  // optional header lines

    upon (replicationEvent(contextVar)) {
        state {
            boolean[] registeredCards;        // bare decls are monitorSide
            monitorSide { int count := 0; }
            systemSide@store { int held; }    // no initialiser
        }
        events {
            event@store pay(customer, card) = { customer.makePayment(card); }
            endSession(customer) = { customer.logOut(); }   // component `main`
        }
        conditions {
            isRegistered(card) = { registeredCards[card] }  // monitorSide
            systemSide@store { inStock(card); }             // opaque callback
        }
        actions {
            registerCard(card) = { registeredCards[card] := true }
            setUntrusted(customer);                         // bodiless = report
        }
        rules {
            pay(customer, card) \\ !isRegistered(card) -> setUntrusted(customer);
            endSession(customer) -> Done;
        }
    }

`//` starts a line comment. The rule condition clause is optional and
`\\ true` parses the same as omitting it.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ParseError
from . import nodes as n

KEYWORDS = {
    "upon", "state", "events", "conditions", "actions", "rules",
    "event", "monitorSide", "systemSide", "components",
    "true", "false", "Done",
    "boolean", "int", "string",
}

# longest first so ':=' wins over ':' (which is not a token at all)
SYMBOLS = (
    ":=", "==", "!=", "<=", ">=", "&&", "||", "->",
    "{", "}", "(", ")", "[", "]", ",", ";", "@", ".", "!", "=", "<", ">", "\\",
)


@dataclass(frozen=True)
class Token:
    kind: str  # 'name', 'int', 'string', a keyword, a symbol, or 'eof'
    value: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    size = len(text)

    def advance(k: int) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < size:
        ch = text[i]
        if ch in " \t\r\n":
            advance(1)
            continue
        if text.startswith("//", i):
            while i < size and text[i] != "\n":
                advance(1)
            continue
        if ch.isalpha() or ch == "_":
            start = i
            start_line, start_col = line, col
            while i < size and (text[i].isalnum() or text[i] == "_"):
                advance(1)
            word = text[start:i]
            kind = word if word in KEYWORDS else "name"
            tokens.append(Token(kind, word, start_line, start_col))
            continue
        if ch.isdigit():
            start = i
            start_line, start_col = line, col
            while i < size and text[i].isdigit():
                advance(1)
            tokens.append(Token("int", text[start:i], start_line, start_col))
            continue
        if ch == '"':
            start_line, start_col = line, col
            advance(1)
            chars: list[str] = []
            while True:
                if i >= size or text[i] == "\n":
                    raise ParseError("unterminated string literal", start_line, start_col)
                c = text[i]
                if c == '"':
                    advance(1)
                    break
                if c == "\\":
                    if i + 1 >= size:
                        raise ParseError("unterminated string literal", start_line, start_col)
                    esc = text[i + 1]
                    mapped = {"\\": "\\", '"': '"', "n": "\n", "t": "\t", "r": "\r"}.get(esc)
                    if mapped is None:
                        raise ParseError(f"unknown escape '\\{esc}'", line, col)
                    chars.append(mapped)
                    advance(2)
                else:
                    chars.append(c)
                    advance(1)
            tokens.append(Token("string", "".join(chars), start_line, start_col))
            continue
        for sym in SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(Token(sym, sym, line, col))
                advance(len(sym))
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # -- token helpers ------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def at(self, kind: str) -> bool:
        return self.peek().kind == kind

    def take(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            shown = tok.value or tok.kind
            raise ParseError(f"expected {kind!r}, found {shown!r}", tok.line, tok.col)
        return self.take()

    def accept(self, kind: str) -> bool:
        if self.at(kind):
            self.take()
            return True
        return False

    def fail(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.col)

    # -- grammar ------------------------------------------------------

    def script(self) -> n.SpecAst:
        components: list[str] = []
        while self.at("components"):
            self.take()
            components.append(self.expect("name").value)
            while self.accept(","):
                components.append(self.expect("name").value)
            self.expect(";")
        upons = []
        if not self.at("upon"):
            raise self.fail("expected an 'upon' block")
        while self.at("upon"):
            upons.append(self.upon_block())
        self.expect("eof")
        return n.SpecAst(upons=tuple(upons), components=tuple(components))

    def upon_block(self) -> n.UponBlock:
        self.expect("upon")
        self.expect("(")
        replication = self.expect("name").value
        self.expect("(")
        context_var = self.expect("name").value
        self.expect(")")
        self.expect(")")
        self.expect("{")

        state: list[n.StateDecl] = []
        events: list[n.EventDecl] = []
        conditions: list[n.CondDecl] = []
        actions: list[n.ActionDecl] = []
        rules: list[n.Rule] = []
        seen: set[str] = set()
        while not self.at("}"):
            section = self.peek()
            if section.kind not in ("state", "events", "conditions", "actions", "rules"):
                raise self.fail("expected a section (state/events/conditions/actions/rules)")
            if section.kind in seen:
                raise ParseError(f"duplicate '{section.kind}' section", section.line, section.col)
            seen.add(section.kind)
            self.take()
            self.expect("{")
            if section.kind == "state":
                state = self.state_items()
            elif section.kind == "events":
                events = self.event_decls()
            elif section.kind == "conditions":
                conditions = self.cond_decls()
            elif section.kind == "actions":
                actions = self.action_decls()
            else:
                rules = self.rules()
            self.expect("}")
        self.expect("}")
        if "rules" not in seen:
            raise self.fail("upon block has no rules section")
        return n.UponBlock(
            replication_event=replication,
            context_var=context_var,
            state_decls=tuple(state),
            events=tuple(events),
            conditions=tuple(conditions),
            actions=tuple(actions),
            rules=tuple(rules),
        )

    def locale_tag(self) -> n.Locale | None:
        if self.accept("monitorSide"):
            return n.MONITOR_SIDE
        if self.accept("systemSide"):
            if self.accept("@"):
                return n.SystemSide(self.expect("name").value)
            return n.SystemSide(n.DEFAULT_COMPONENT)
        return None

    # state ------------------------------------------------------------

    def state_items(self) -> list[n.StateDecl]:
        decls: list[n.StateDecl] = []
        while not self.at("}"):
            locale = self.locale_tag()
            if locale is not None:
                self.expect("{")
                while not self.at("}"):
                    decls.append(self.state_decl(locale))
                self.expect("}")
            else:
                decls.append(self.state_decl(n.MONITOR_SIDE))
        return decls

    def state_decl(self, locale: n.Locale) -> n.StateDecl:
        tok = self.peek()
        if tok.kind not in ("boolean", "int", "string"):
            raise self.fail("expected a state type (boolean/int/string)")
        self.take()
        kind = tok.kind
        if self.accept("["):
            self.expect("]")
            kind = kind + "[]"
        name = self.expect("name").value
        initial: n.Value | None
        if isinstance(locale, n.SystemSide):
            initial = None
        else:
            initial = n.KIND_DEFAULT[kind]
        if self.accept(":="):
            lit = self.literal()
            initial = lit.value
        self.expect(";")
        return n.StateDecl(name=name, kind=kind, locale=locale, initial=initial)

    # events -----------------------------------------------------------

    def event_decls(self) -> list[n.EventDecl]:
        decls = []
        while not self.at("}"):
            component = n.DEFAULT_COMPONENT
            if self.accept("event"):
                self.expect("@")
                component = self.expect("name").value
            name = self.expect("name").value
            params = self.name_list_parens(allow_empty=True)
            self.expect("=")
            self.expect("{")
            target = self.dotted_name()
            args = self.name_list_parens(allow_empty=True)
            self.expect(";")
            self.expect("}")
            self.accept(";")
            decls.append(n.EventDecl(
                name=name, params=params, component=component,
                trigger=n.TriggerPattern(target=target, args=args),
            ))
        return decls

    def dotted_name(self) -> str:
        parts = [self.expect("name").value]
        while self.accept("."):
            parts.append(self.expect("name").value)
        return ".".join(parts)

    def name_list_parens(self, allow_empty: bool) -> tuple[str, ...]:
        self.expect("(")
        names: list[str] = []
        if not self.at(")"):
            names.append(self.expect("name").value)
            while self.accept(","):
                names.append(self.expect("name").value)
        if not names and not allow_empty:
            raise self.fail("expected at least one name")
        self.expect(")")
        return tuple(names)

    # conditions / actions ----------------------------------------------

    def cond_decls(self) -> list[n.CondDecl]:
        decls: list[n.CondDecl] = []
        while not self.at("}"):
            locale = self.locale_tag()
            if locale is not None:
                self.expect("{")
                while not self.at("}"):
                    decls.append(self.cond_decl(locale))
                self.expect("}")
                self.accept(";")
            else:
                decls.append(self.cond_decl(n.MONITOR_SIDE))
        return decls

    def cond_decl(self, locale: n.Locale) -> n.CondDecl:
        name = self.expect("name").value
        params = self.name_list_parens(allow_empty=True)
        if isinstance(locale, n.SystemSide):
            self.expect(";")
            return n.CondDecl(name=name, params=params, locale=locale, body=None)
        self.expect("=")
        self.expect("{")
        body = self.expr()
        self.expect("}")
        self.accept(";")
        return n.CondDecl(name=name, params=params, locale=locale, body=body)

    def action_decls(self) -> list[n.ActionDecl]:
        decls: list[n.ActionDecl] = []
        while not self.at("}"):
            locale = self.locale_tag()
            if locale is not None:
                self.expect("{")
                while not self.at("}"):
                    decls.append(self.action_decl(locale))
                self.expect("}")
                self.accept(";")
            else:
                decls.append(self.action_decl(n.MONITOR_SIDE))
        return decls

    def action_decl(self, locale: n.Locale) -> n.ActionDecl:
        name = self.expect("name").value
        params = self.name_list_parens(allow_empty=True)
        if isinstance(locale, n.SystemSide) or self.at(";"):
            self.expect(";")
            return n.ActionDecl(name=name, params=params, locale=locale, body=None)
        self.expect("=")
        self.expect("{")
        body = self.expr()
        self.expect("}")
        self.accept(";")
        return n.ActionDecl(name=name, params=params, locale=locale, body=body)

    # rules --------------------------------------------------------------

    def rules(self) -> list[n.Rule]:
        rules = []
        while not self.at("}"):
            rules.append(self.rule())
        if not rules:
            raise self.fail("rules section is empty")
        return rules

    def rule(self) -> n.Rule:
        event_name = self.expect("name").value
        event_args = self.name_list_parens(allow_empty=True)
        condition: n.RuleRef | None = None
        if self.accept("\\"):
            condition = self.rule_condition()
        self.expect("->")
        action: n.RuleRef | None
        if self.accept("Done"):
            action = None
        else:
            name = self.expect("name").value
            args: tuple[str, ...] = ()
            if self.at("("):
                args = self.name_list_parens(allow_empty=True)
            action = n.RuleRef(name=name, args=args)
        self.expect(";")
        return n.Rule(event=n.RuleRef(event_name, event_args), condition=condition, action=action)

    def rule_condition(self) -> n.RuleRef | None:
        if self.accept("true"):
            return None
        negated = self.accept("!")
        if self.at("true"):
            raise self.fail("the built-in condition 'true' cannot be negated")
        name = self.expect("name").value
        args: tuple[str, ...] = ()
        if self.at("("):
            args = self.name_list_parens(allow_empty=True)
        return n.RuleRef(name=name, args=args, negated=negated)

    # expressions ----------------------------------------------------------

    def expr(self) -> n.Expr:
        e = self.assign_expr()
        while self.accept(";"):
            if self.at("}"):  # tolerate a trailing semicolon inside a body
                break
            e = n.Seq(first=e, second=self.assign_expr())
        return e

    def assign_expr(self) -> n.Expr:
        e = self.or_expr()
        if self.at(":="):
            tok = self.take()
            value = self.or_expr()
            if isinstance(e, n.Name):
                return n.Assign(target=e.ident, value=value)
            if isinstance(e, n.MapGet):
                return n.MapPut(map=e.map, key=e.key, value=value)
            raise ParseError("left side of ':=' must be a variable or m[k]", tok.line, tok.col)
        return e

    def or_expr(self) -> n.Expr:
        e = self.and_expr()
        while self.at("||"):
            self.take()
            e = n.BinOp(op="||", left=e, right=self.and_expr())
        return e

    def and_expr(self) -> n.Expr:
        e = self.cmp_expr()
        while self.at("&&"):
            self.take()
            e = n.BinOp(op="&&", left=e, right=self.cmp_expr())
        return e

    def cmp_expr(self) -> n.Expr:
        e = self.unary_expr()
        if self.peek().kind in n.COMPARISON_OPS:
            op = self.take().kind
            e = n.BinOp(op=op, left=e, right=self.unary_expr())
        return e

    def unary_expr(self) -> n.Expr:
        if self.accept("!"):
            return n.Not(operand=self.unary_expr())
        return self.primary()

    def primary(self) -> n.Expr:
        tok = self.peek()
        if tok.kind in ("true", "false", "int", "string"):
            return self.literal()
        if tok.kind == "name":
            self.take()
            if self.accept("["):
                key = self.expr()
                self.expect("]")
                return n.MapGet(map=tok.value, key=key)
            return n.Name(ident=tok.value)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        raise self.fail(f"expected an expression, found {tok.value or tok.kind!r}")

    def literal(self) -> n.Lit:
        tok = self.take()
        if tok.kind == "true":
            return n.Lit(True)
        if tok.kind == "false":
            return n.Lit(False)
        if tok.kind == "int":
            return n.Lit(int(tok.value))
        if tok.kind == "string":
            return n.Lit(tok.value)
        raise ParseError(f"expected a literal, found {tok.value or tok.kind!r}", tok.line, tok.col)


def parse_spec(text: str) -> n.SpecAst:
    """Parse script source into an AST.

    Raises ParseError (with line/column) on any lexical or grammar
    failure. The result is deterministic in the input text and
    round-trips through the pretty-printer.
    """
    return _Parser(tokenize(text)).script()


def parse_expr(text: str) -> n.Expr:
    """Parse a single expression (test/tooling convenience)."""
    parser = _Parser(tokenize(text))
    e = parser.expr()
    parser.expect("eof")
    return e
