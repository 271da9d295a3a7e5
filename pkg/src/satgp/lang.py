"""Initialization programs: expression trees, interpreter and text format.

An initialization program computes one activity value per CNF variable.
It consists of three expression trees that plug into this template,
executed once per variable X:

    a0 = 0.0; v1 = 0.0; v2 = 0.0
    PRE
    for each clause C containing X (binary clauses first):
        for each literal L in C except X's own literal:
            IN
    POST
    activity(X) = a0

PRE and POST see only whole-formula terminals; IN additionally sees the
clause/literal terminals (ln, lp, lc, cs, xs, ls, ic, il).  All function
return values and register writes are clamped to [-1e6, 1e6], and division
by anything smaller in magnitude than 1e-9 returns the positive or
negative limit according to the numerator's sign (sign of 0 counts as
positive).  Every function is total, so evaluation cannot fail at runtime.

`compute_activities` sweeps the clause list once, updating per-variable
register banks; `reference_compute_activities` is the naive per-variable
double loop kept as an independent oracle.  Both must agree bitwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .cnf import Cnf, VarStats, compute_var_stats

CLAMP_LIMIT = 1e6
DIV_EPSILON = 1e-9

# Terminals usable in every fragment; loop terminals only inside IN.
TERMINALS_COMMON = (
    "xn", "xp", "xc", "nv", "nc", "0", "1", "2", "3", "4", "a0", "v1", "v2",
)
TERMINALS_LOOP = ("ln", "lp", "lc", "cs", "xs", "ls", "ic", "il")

TERMINALS_BY_FRAGMENT = {
    "pre": TERMINALS_COMMON,
    "in": TERMINALS_COMMON + TERMINALS_LOOP,
    "post": TERMINALS_COMMON,
}

_CONSTANTS = {"0": 0.0, "1": 1.0, "2": 2.0, "3": 3.0, "4": 4.0}

# Function name -> arity.  plus/minus/times/pdiv are the pure infix
# arithmetics (+ - * %); pdiv is protected division and does not touch a0,
# unlike div() which assigns a0.
FUNCTIONS = {
    "add": 1, "sub": 1, "mul": 1, "div": 1, "set": 1,
    "setv1": 1, "setv2": 1,
    "inv": 1, "neg": 1, "exp": 1, "log": 1, "sgn": 1, "sqrt": 1, "abs": 1,
    "progn2": 2, "min": 2, "max": 2,
    "and": 2, "or": 2, "xor": 2, "lessthan": 2,
    "plus": 2, "minus": 2, "times": 2, "pdiv": 2,
    "progn3": 3, "if": 3,
}

SIDE_EFFECT_FUNCTIONS = frozenset(
    {"add", "sub", "mul", "div", "set", "setv1", "setv2"}
)

_INFIX_SYMBOL = {"plus": "+", "minus": "-", "times": "*", "pdiv": "%"}
_INFIX_PRECEDENCE = {"plus": 1, "minus": 1, "times": 2, "pdiv": 2}

FRAGMENT_NAMES = ("pre", "in", "post")


class ProgramSyntaxError(ValueError):
    """Raised for malformed program text or fragment-rule violations."""


@dataclass(frozen=True)
class Node:
    """One tree node: a terminal (no children) or a function application."""

    kind: str
    children: tuple["Node", ...] = ()


ZERO = Node("0")


def node_count(tree: Node) -> int:
    return 1 + sum(node_count(c) for c in tree.children)


def tree_depth(tree: Node) -> int:
    """Depth counted in nodes: a lone terminal has depth 1."""
    if not tree.children:
        return 1
    return 1 + max(tree_depth(c) for c in tree.children)


def iter_nodes(tree: Node):
    """Preorder traversal."""
    yield tree
    for child in tree.children:
        yield from iter_nodes(child)


def subtree_at(tree: Node, index: int) -> Node:
    """Return the subtree rooted at preorder position `index`."""
    for i, node in enumerate(iter_nodes(tree)):
        if i == index:
            return node
    raise IndexError(index)


def replace_subtree(tree: Node, index: int, donor: Node) -> Node:
    """Return a copy of `tree` with the node at preorder `index` replaced."""

    def rebuild(node: Node, pos: int) -> tuple[Node, int]:
        if pos == index:
            return donor, pos + node_count(node)
        nxt = pos + 1
        if not node.children:
            return node, nxt
        new_children = []
        changed = False
        for child in node.children:
            new_child, nxt = rebuild(child, nxt)
            changed = changed or new_child is not child
            new_children.append(new_child)
        if not changed:
            return node, nxt
        return Node(node.kind, tuple(new_children)), nxt

    result, _ = rebuild(tree, 0)
    return result


def validate_tree(tree: Node, fragment: str) -> None:
    """Check arities and fragment terminal restrictions; raise on violation."""
    legal_terminals = TERMINALS_BY_FRAGMENT[fragment]
    for node in iter_nodes(tree):
        if node.kind in FUNCTIONS:
            arity = FUNCTIONS[node.kind]
            if len(node.children) != arity:
                raise ProgramSyntaxError(
                    f"{node.kind} expects {arity} argument(s), got {len(node.children)}"
                )
        elif node.kind in TERMINALS_BY_FRAGMENT["in"]:
            if node.children:
                raise ProgramSyntaxError(f"terminal {node.kind} cannot take arguments")
            if node.kind not in legal_terminals:
                raise ProgramSyntaxError(
                    f"terminal {node.kind} is only available inside IN,"
                    f" not in {fragment.upper()}"
                )
        else:
            raise ProgramSyntaxError(f"unknown symbol {node.kind!r}")


@dataclass(frozen=True)
class InitProgram:
    """The GP genotype: one tree per template fragment."""

    pre: Node = ZERO
    in_loop: Node = ZERO
    post: Node = ZERO

    @property
    def node_count(self) -> int:
        return node_count(self.pre) + node_count(self.in_loop) + node_count(self.post)

    def fragments(self):
        yield "pre", self.pre
        yield "in", self.in_loop
        yield "post", self.post


def validate_program(prog: InitProgram) -> None:
    for fragment, tree in prog.fragments():
        validate_tree(tree, fragment)


class Registers:
    """Per-variable mutable registers; reset to zero before PRE runs."""

    __slots__ = ("a0", "v1", "v2")

    def __init__(self):
        self.a0 = 0.0
        self.v1 = 0.0
        self.v2 = 0.0


class EvalContext:
    """Terminal values for the variable / clause / literal in scope.

    Loop fields (ln..il) are only meaningful while an IN tree runs; the
    fragment rules guarantee PRE/POST never read them.  node_evals counts
    every eval_node call for cost accounting.
    """

    __slots__ = (
        "xn", "xp", "xc", "nv", "nc",
        "ln", "lp", "lc", "cs", "xs", "ls", "ic", "il",
        "node_evals",
    )

    def __init__(self):
        for name in self.__slots__:
            setattr(self, name, 0.0)
        self.node_evals = 0


def _clamp(x: float) -> float:
    if x > CLAMP_LIMIT:
        return CLAMP_LIMIT
    if x < -CLAMP_LIMIT:
        return -CLAMP_LIMIT
    return x


def eval_node(node: Node, ctx: EvalContext, regs: Registers) -> float:
    """Evaluate one tree depth-first, left to right, with side effects.

    Only `if` is lazy (it evaluates the condition and exactly one branch);
    every other function evaluates all of its children.
    """
    ctx.node_evals += 1
    kind = node.kind
    ch = node.children

    if not ch:
        c = _CONSTANTS.get(kind)
        if c is not None:
            return c
        if kind == "a0":
            return regs.a0
        if kind == "v1":
            return regs.v1
        if kind == "v2":
            return regs.v2
        return getattr(ctx, kind)

    if kind == "add":
        v = eval_node(ch[0], ctx, regs)  # child first: it may write a0
        regs.a0 = _clamp(regs.a0 + v)
        return regs.a0
    if kind == "sub":
        v = eval_node(ch[0], ctx, regs)
        regs.a0 = _clamp(regs.a0 - v)
        return regs.a0
    if kind == "mul":
        v = eval_node(ch[0], ctx, regs)
        regs.a0 = _clamp(regs.a0 * v)
        return regs.a0
    if kind == "div":
        v = eval_node(ch[0], ctx, regs)
        if -DIV_EPSILON < v < DIV_EPSILON:
            regs.a0 = CLAMP_LIMIT if regs.a0 >= 0 else -CLAMP_LIMIT
        else:
            regs.a0 = _clamp(regs.a0 / v)
        return regs.a0
    if kind == "set":
        regs.a0 = _clamp(eval_node(ch[0], ctx, regs))
        return regs.a0
    if kind == "setv1":
        regs.v1 = _clamp(eval_node(ch[0], ctx, regs))
        return regs.v1
    if kind == "setv2":
        regs.v2 = _clamp(eval_node(ch[0], ctx, regs))
        return regs.v2
    if kind == "inv":
        v = eval_node(ch[0], ctx, regs)
        if -DIV_EPSILON < v < DIV_EPSILON:
            return CLAMP_LIMIT
        return _clamp(1.0 / v)
    if kind == "neg":
        return _clamp(-eval_node(ch[0], ctx, regs))
    if kind == "exp":
        v = eval_node(ch[0], ctx, regs)
        if v > 709.0:  # math.exp overflows above ~709.78
            return CLAMP_LIMIT
        return _clamp(math.exp(v))
    if kind == "log":
        v = eval_node(ch[0], ctx, regs)
        if v <= 0.0:
            return -CLAMP_LIMIT
        return _clamp(math.log(v))
    if kind == "sgn":
        v = eval_node(ch[0], ctx, regs)
        if v < 0.0:
            return -1.0
        return 1.0 if v > 0.0 else 0.0
    if kind == "sqrt":
        v = eval_node(ch[0], ctx, regs)
        if v < 0.0:
            return -1.0
        return _clamp(math.sqrt(v))
    if kind == "abs":
        return _clamp(abs(eval_node(ch[0], ctx, regs)))
    if kind == "progn2":
        eval_node(ch[0], ctx, regs)
        return _clamp(eval_node(ch[1], ctx, regs))
    if kind == "min":
        x = eval_node(ch[0], ctx, regs)
        y = eval_node(ch[1], ctx, regs)
        return _clamp(min(x, y))
    if kind == "max":
        x = eval_node(ch[0], ctx, regs)
        y = eval_node(ch[1], ctx, regs)
        return _clamp(max(x, y))
    if kind == "and":
        x = eval_node(ch[0], ctx, regs)
        y = eval_node(ch[1], ctx, regs)
        return 1.0 if x > 0.0 and y > 0.0 else 0.0
    if kind == "or":
        x = eval_node(ch[0], ctx, regs)
        y = eval_node(ch[1], ctx, regs)
        return 1.0 if x > 0.0 or y > 0.0 else 0.0
    if kind == "xor":
        x = eval_node(ch[0], ctx, regs)
        y = eval_node(ch[1], ctx, regs)
        return 1.0 if (x > 0.0) != (y > 0.0) else 0.0
    if kind == "lessthan":
        x = eval_node(ch[0], ctx, regs)
        y = eval_node(ch[1], ctx, regs)
        return 1.0 if x < y else 0.0
    if kind == "plus":
        return _clamp(eval_node(ch[0], ctx, regs) + eval_node(ch[1], ctx, regs))
    if kind == "minus":
        return _clamp(eval_node(ch[0], ctx, regs) - eval_node(ch[1], ctx, regs))
    if kind == "times":
        return _clamp(eval_node(ch[0], ctx, regs) * eval_node(ch[1], ctx, regs))
    if kind == "pdiv":
        x = eval_node(ch[0], ctx, regs)
        y = eval_node(ch[1], ctx, regs)
        if -DIV_EPSILON < y < DIV_EPSILON:
            return CLAMP_LIMIT if x >= 0 else -CLAMP_LIMIT
        return _clamp(x / y)
    if kind == "progn3":
        eval_node(ch[0], ctx, regs)
        eval_node(ch[1], ctx, regs)
        return _clamp(eval_node(ch[2], ctx, regs))
    if kind == "if":
        cond = eval_node(ch[0], ctx, regs)
        branch = ch[1] if cond > 0.0 else ch[2]
        return _clamp(eval_node(branch, ctx, regs))
    raise ProgramSyntaxError(f"unknown function {kind!r}")


def binary_first_order(clauses) -> list[tuple[int, ...]]:
    """The pinned clause visit order: two-literal clauses first, then the
    rest, each group in stored order."""
    binaries = [c for c in clauses if len(c) == 2]
    others = [c for c in clauses if len(c) != 2]
    return binaries + others


def _check_in_bounds(ctx: EvalContext) -> None:
    if not (ctx.ln >= 0 and ctx.lp >= 0 and ctx.lc == ctx.ln + ctx.lp):
        raise RuntimeError("literal stats out of bounds")
    if ctx.cs < 2:
        raise RuntimeError("IN ran for a clause narrower than 2 literals")
    if ctx.xs not in (0.0, 1.0) or ctx.ls not in (0.0, 1.0):
        raise RuntimeError("polarity terminal outside {0,1}")
    if not (0 <= ctx.ic < ctx.xc):
        raise RuntimeError(f"ic={ctx.ic} outside [0, xc={ctx.xc})")
    if not (0 <= ctx.il < ctx.cs - 1):
        raise RuntimeError(f"il={ctx.il} outside [0, cs-1={ctx.cs - 1})")


def compute_activities(
    prog: InitProgram,
    cnf: Cnf,
    stats: VarStats | None = None,
    *,
    check_bounds: bool = False,
    counters: dict | None = None,
) -> list[float]:
    """Run the program over the CNF in a single clause sweep.

    Result index v-1 holds the activity of variable v.  Each variable has
    its own register bank; the sweep runs PRE for every variable, then
    visits each clause once (binary clauses first), running IN for every
    (member variable X, other literal L) combination, then runs POST.
    For a fixed variable this performs exactly the operations of the
    per-variable template, so it matches reference_compute_activities
    bitwise.

    Cost: IN runs exactly sum over clauses of |C|*(|C|-1) times, so node
    evaluations are bounded by in_tree_size * that sum plus
    (pre_size + post_size) * num_vars.

    check_bounds validates the documented loop-terminal ranges on every IN
    execution; counters (a dict) receives 'node_evals' and 'in_executions'.
    """
    validate_program(prog)
    if stats is None:
        stats = compute_var_stats(cnf)
    n = cnf.num_vars
    if len(stats.xc) != n + 1:
        raise ValueError("VarStats size does not match cnf.num_vars")

    xnf = [float(x) for x in stats.xn]
    xpf = [float(x) for x in stats.xp]
    xcf = [float(x) for x in stats.xc]
    nvf = float(n)
    ncf = float(len(cnf.clauses))

    ctx = EvalContext()
    ctx.nv = nvf
    ctx.nc = ncf
    regs = [Registers() for _ in range(n + 1)]
    in_runs = 0

    pre, in_tree, post = prog.pre, prog.in_loop, prog.post

    for v in range(1, n + 1):
        ctx.xn, ctx.xp, ctx.xc = xnf[v], xpf[v], xcf[v]
        eval_node(pre, ctx, regs[v])

    ic_counter = [0] * (n + 1)
    for clause in binary_first_order(cnf.clauses):
        width = len(clause)
        width_f = float(width)
        for i, lit_x in enumerate(clause):
            x = abs(lit_x)
            ctx.xn, ctx.xp, ctx.xc = xnf[x], xpf[x], xcf[x]
            ctx.cs = width_f
            ctx.xs = 1.0 if lit_x > 0 else 0.0
            ctx.ic = float(ic_counter[x])
            bank = regs[x]
            il = 0
            for j, lit_l in enumerate(clause):
                if j == i:
                    continue
                lv = abs(lit_l)
                ctx.ln, ctx.lp, ctx.lc = xnf[lv], xpf[lv], xcf[lv]
                ctx.ls = 1.0 if lit_l > 0 else 0.0
                ctx.il = float(il)
                if check_bounds:
                    _check_in_bounds(ctx)
                eval_node(in_tree, ctx, bank)
                in_runs += 1
                il += 1
            ic_counter[x] += 1

    out = [0.0] * n
    for v in range(1, n + 1):
        ctx.xn, ctx.xp, ctx.xc = xnf[v], xpf[v], xcf[v]
        eval_node(post, ctx, regs[v])
        out[v - 1] = _clamp(regs[v].a0)

    if counters is not None:
        counters["node_evals"] = ctx.node_evals
        counters["in_executions"] = in_runs
    return out


def reference_compute_activities(
    prog: InitProgram,
    cnf: Cnf,
    stats: VarStats | None = None,
    *,
    check_bounds: bool = False,
) -> list[float]:
    """Direct per-variable transcription of the template; testing oracle.

    Deliberately naive: for each variable it walks the whole clause list
    looking for occurrences.  Must equal compute_activities bitwise.
    """
    validate_program(prog)
    if stats is None:
        stats = compute_var_stats(cnf)
    n = cnf.num_vars
    if len(stats.xc) != n + 1:
        raise ValueError("VarStats size does not match cnf.num_vars")

    ordered = binary_first_order(cnf.clauses)
    out = [0.0] * n
    for x in range(1, n + 1):
        ctx = EvalContext()
        ctx.nv = float(n)
        ctx.nc = float(len(cnf.clauses))
        ctx.xn = float(stats.xn[x])
        ctx.xp = float(stats.xp[x])
        ctx.xc = float(stats.xc[x])
        regs = Registers()

        eval_node(prog.pre, ctx, regs)
        ic = 0
        for clause in ordered:
            x_pos = None
            for j, lit in enumerate(clause):
                if abs(lit) == x:
                    x_pos = j
                    break
            if x_pos is None:
                continue
            ctx.cs = float(len(clause))
            ctx.xs = 1.0 if clause[x_pos] > 0 else 0.0
            ctx.ic = float(ic)
            il = 0
            for j, lit_l in enumerate(clause):
                if j == x_pos:
                    continue
                lv = abs(lit_l)
                ctx.ln = float(stats.xn[lv])
                ctx.lp = float(stats.xp[lv])
                ctx.lc = float(stats.xc[lv])
                ctx.ls = 1.0 if lit_l > 0 else 0.0
                ctx.il = float(il)
                if check_bounds:
                    _check_in_bounds(ctx)
                eval_node(prog.in_loop, ctx, regs)
                il += 1
            ic += 1
        eval_node(prog.post, ctx, regs)
        out[x - 1] = _clamp(regs.a0)
    return out


def normalize(acts: list[float]) -> list[float]:
    """Divide all activities by the largest magnitude.

    The result lies in [-1, 1] with at least one entry of magnitude
    exactly 1; an all-zero vector is returned unchanged.  Idempotent.
    """
    biggest = max((abs(a) for a in acts), default=0.0)
    if biggest == 0.0:
        return list(acts)
    return [a / biggest for a in acts]


# ---------------------------------------------------------------------------
# Text format


_LABEL_ALIASES = {
    "PRE": "pre", "PRE_LOOP_CODE": "pre",
    "IN": "in", "IN_LOOP_CODE": "in",
    "POST": "post", "POST_LOOP_CODE": "post",
}


def _tokenize(text: str) -> list[str]:
    tokens = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(text[i:j])
            i = j
        elif c.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(text[i:j])
            i = j
        elif c in "()+-*%,{}":
            tokens.append(c)
            i += 1
        else:
            raise ProgramSyntaxError(f"unexpected character {c!r}")
    return tokens


class _ExprParser:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        if tok is None:
            raise ProgramSyntaxError("unexpected end of expression")
        self.pos += 1
        return tok

    def expect(self, tok: str):
        got = self.take()
        if got != tok:
            raise ProgramSyntaxError(f"expected {tok!r}, got {got!r}")

    def parse_sequence(self) -> Node:
        """Comma-separated expressions; sugar for progn2/progn3 chains."""
        items = [self.parse_additive()]
        while self.peek() == ",":
            self.take()
            items.append(self.parse_additive())
        return _fold_sequence(items)

    def parse_additive(self) -> Node:
        node = self.parse_multiplicative()
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.parse_multiplicative()
            node = Node("plus" if op == "+" else "minus", (node, rhs))
        return node

    def parse_multiplicative(self) -> Node:
        node = self.parse_unary()
        while self.peek() in ("*", "%"):
            op = self.take()
            rhs = self.parse_unary()
            node = Node("times" if op == "*" else "pdiv", (node, rhs))
        return node

    def parse_unary(self) -> Node:
        if self.peek() == "-":
            self.take()
            return Node("neg", (self.parse_unary(),))
        return self.parse_primary()

    def parse_primary(self) -> Node:
        tok = self.take()
        if tok == "(":
            node = self.parse_additive()
            self.expect(")")
            return node
        if tok.isdigit():
            if tok not in _CONSTANTS:
                raise ProgramSyntaxError(
                    f"constant {tok} not available (only 0..4)"
                )
            return Node(tok)
        if tok.isidentifier():
            if self.peek() == "(":
                self.take()
                args = [self.parse_additive()]
                while self.peek() == ",":
                    self.take()
                    args.append(self.parse_additive())
                self.expect(")")
                if tok not in FUNCTIONS:
                    raise ProgramSyntaxError(f"unknown function {tok!r}")
                if len(args) != FUNCTIONS[tok]:
                    raise ProgramSyntaxError(
                        f"{tok} expects {FUNCTIONS[tok]} argument(s), got {len(args)}"
                    )
                return Node(tok, tuple(args))
            if tok in TERMINALS_BY_FRAGMENT["in"]:
                return Node(tok)
            raise ProgramSyntaxError(f"unknown symbol {tok!r}")
        raise ProgramSyntaxError(f"unexpected token {tok!r}")


def _fold_sequence(items: list[Node]) -> Node:
    while len(items) > 1:
        if len(items) == 2:
            return Node("progn2", (items[0], items[1]))
        head = Node("progn3", (items[0], items[1], items[2]))
        items = [head] + items[3:]
    return items[0]


def parse_program(text: str) -> InitProgram:
    """Parse program text into an InitProgram.

    Fragments are labeled PRE / IN / POST (the *_LOOP_CODE long forms are
    accepted too) followed by ':' or '=' and an expression; fragments are
    separated by '/' or simply by the next label.  Missing or empty ('{}')
    fragments default to the terminal 0.  Loop-only terminals are rejected
    outside IN.
    """
    # Locate fragment labels without tokenizing the whole text first, so
    # that '/' may act as a separator.
    found: dict[str, str] = {}
    spans = []
    upper = text.upper()
    for alias, fragment in _LABEL_ALIASES.items():
        start = 0
        while True:
            idx = upper.find(alias, start)
            if idx == -1:
                break
            end = idx + len(alias)
            before_ok = idx == 0 or not (text[idx - 1].isalnum() or text[idx - 1] == "_")
            rest = text[end:].lstrip()
            after_ok = rest[:1] in (":", "=")  # 'PRE_LOOP_CODE' fails this for 'PRE'
            if before_ok and after_ok:
                separator_pos = end + (len(text[end:]) - len(rest))
                spans.append((idx, separator_pos + 1, fragment))
            start = end
    spans.sort()
    if not spans:
        raise ProgramSyntaxError("no PRE/IN/POST fragment label found")
    head = text[: spans[0][0]].strip()
    if head:
        raise ProgramSyntaxError(f"unexpected text before first label: {head!r}")

    for i, (_, body_start, fragment) in enumerate(spans):
        body_end = spans[i + 1][0] if i + 1 < len(spans) else len(text)
        body = text[body_start:body_end].strip()
        body = body.rstrip("/").strip()  # '/' separates fragments
        if fragment in found:
            raise ProgramSyntaxError(f"duplicate fragment {fragment.upper()}")
        found[fragment] = body

    trees = {}
    for fragment in FRAGMENT_NAMES:
        body = found.get(fragment, "")
        if body in ("", "{}"):
            trees[fragment] = ZERO
            continue
        parser = _ExprParser(_tokenize(body))
        tree = parser.parse_sequence()
        if parser.peek() is not None:
            raise ProgramSyntaxError(
                f"trailing tokens in {fragment.upper()}: {parser.peek()!r}"
            )
        validate_tree(tree, fragment)
        trees[fragment] = tree
    return InitProgram(pre=trees["pre"], in_loop=trees["in"], post=trees["post"])


def _print_expr(node: Node, parent_prec: int = 0, right_side: bool = False) -> str:
    kind = node.kind
    if not node.children:
        return kind
    sym = _INFIX_SYMBOL.get(kind)
    if sym is None:
        args = ", ".join(_print_expr(c) for c in node.children)
        return f"{kind}({args})"
    prec = _INFIX_PRECEDENCE[kind]
    left = _print_expr(node.children[0], prec, False)
    right = _print_expr(node.children[1], prec, True)
    text = f"{left}{sym}{right}"
    # Parenthesize when this node binds looser than its parent, or when it
    # sits on the right of an equal-precedence operator (left associativity).
    if prec < parent_prec or (prec == parent_prec and right_side):
        return f"({text})"
    return text


def print_program(prog: InitProgram) -> str:
    """Canonical one-line text form; fragments equal to `0` are omitted.

    parse_program(print_program(p)) reconstructs p exactly.  Sequencing
    commas from the input are canonicalized into explicit progn2/progn3
    calls.
    """
    parts = []
    labels = {"pre": "PRE", "in": "IN", "post": "POST"}
    for fragment, tree in prog.fragments():
        if tree == ZERO:
            continue
        parts.append(f"{labels[fragment]}: {_print_expr(tree)}")
    if not parts:
        return "IN: 0"
    return " / ".join(parts)


PRESETS = {
    "zero": "IN: 0",
    "add_lc": "IN: add(lc)",
    "sub_xp": "IN: sub(xp)",
    "precursor": "IN: add(exp(-lc)-lp)",
}


def preset_program(name: str) -> InitProgram:
    """Look up a built-in program by name ('zero', 'add_lc', 'sub_xp',
    'precursor')."""
    try:
        return parse_program(PRESETS[name])
    except KeyError:
        raise KeyError(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}"
        ) from None
