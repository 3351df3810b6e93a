"""Topology description language.

A small declarative format for wiring up networks:

    network Network {
        ue ue;                   # or a vector: ue u[4];
        enb enb;
        sgw_mme sgw_mme;
        pdn_gw pdn_gw;
        attach ue -> enb;
        link enb -> sgw_mme delay 5ms;   # optional; defaults are wired in
        generator on ue { period 10ms; }
        run until 1s;
        seed 7;
    }

"#" starts a line comment. Durations are integers with a unit suffix
(ns/us/ms/s); there is no floating point in configs. Selectors address
vector nodes as name[2], name[0..3] or name[*]; a bare name means every
instance of that declaration.

parse() reports syntax problems as located diagnostics and keeps going
where it safely can; validate() checks the topology rules (exactly one
PDN-GW and one S-GW/MME, every UE attached, selectors resolve, and so
on); build() turns a validated spec into a runnable module tree.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

from .kernel import (MessageKind, NS_PER_MS, NS_PER_S, NS_PER_US, SimTime,
                     SimulationError)
from .model import ChannelSpec, CompoundModule
from .lte_nodes import (NodeType, attach_ue, build_enb, build_pdn_gw,
                        build_sgw_mme, build_ue, link_enb_to_sgw, link_sgw_to_pdn)
from .traffic import GeneratorConfig

DURATION_UNITS = {"ns": 1, "us": NS_PER_US, "ms": NS_PER_MS, "s": NS_PER_S}

NODE_KEYWORDS = {
    "ue": NodeType.UE,
    "enb": NodeType.ENB,
    "sgw_mme": NodeType.SGW_MME,
    "pdn_gw": NodeType.PDN_GW,
}


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True, slots=True)
class ParseDiagnostic:
    severity: Severity
    line: int
    col: int
    message: str

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    def __str__(self) -> str:
        return f"{self.line}:{self.col}: {self.severity.value}: {self.message}"


class InvalidNetworkSpec(SimulationError):
    """Raised by build() when handed a spec that does not validate."""

    def __init__(self, diagnostics):
        super().__init__("; ".join(str(d) for d in diagnostics))
        self.diagnostics = list(diagnostics)


class SelectorKind(enum.Enum):
    BARE = "bare"      # every instance of the declaration
    INDEX = "index"    # name[i]
    RANGE = "range"    # name[lo..hi], inclusive
    STAR = "star"      # name[*]


@dataclass(frozen=True, slots=True)
class Selector:
    name: str
    kind: SelectorKind = SelectorKind.BARE
    lo: Optional[int] = None
    hi: Optional[int] = None

    def __str__(self) -> str:
        if self.kind is SelectorKind.BARE:
            return self.name
        if self.kind is SelectorKind.INDEX:
            return f"{self.name}[{self.lo}]"
        if self.kind is SelectorKind.RANGE:
            return f"{self.name}[{self.lo}..{self.hi}]"
        return f"{self.name}[*]"


@dataclass
class NodeDecl:
    kind: NodeType
    name: str
    count: Optional[int] = None  # None: singleton with a bare name
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)

    def instances(self) -> list[str]:
        if self.count is None:
            return [self.name]
        return [f"{self.name}[{i}]" for i in range(self.count)]


@dataclass
class AttachDecl:
    ue: Selector
    enb: Selector
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass
class LinkDecl:
    src: Selector
    dst: Selector
    delay: Optional[SimTime] = None  # None: unspecified, treated as 0
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass
class GeneratorDecl:
    target: Selector
    config: GeneratorConfig
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass
class NetworkSpec:
    """Parsed, printable topology description."""

    network_name: str
    node_decls: list[NodeDecl] = field(default_factory=list)
    attachments: list[AttachDecl] = field(default_factory=list)
    links: list[LinkDecl] = field(default_factory=list)
    generators: list[GeneratorDecl] = field(default_factory=list)
    until: Optional[SimTime] = None
    seed: Optional[int] = None
    # Programmatic only: replacement interior layers per node kind.
    chain_overrides: dict = field(default_factory=dict)

    @property
    def effective_seed(self) -> int:
        return 0 if self.seed is None else self.seed


@dataclass
class ParseResult:
    spec: Optional[NetworkSpec]
    diagnostics: list[ParseDiagnostic]

    @property
    def ok(self) -> bool:
        return self.spec is not None and not any(d.is_error for d in self.diagnostics)


def parse_duration(text: str) -> SimTime:
    """Parse "10ms"-style duration text (used by the CLI for overrides)."""
    body = text.strip()
    for unit in ("ns", "us", "ms", "s"):  # "s" last: "ms" ends with it
        if body.endswith(unit) and body[:-len(unit)].isdigit():
            return SimTime(int(body[:-len(unit)]) * DURATION_UNITS[unit])
    raise ValueError(f"bad duration {text!r}: expected INT followed by ns/us/ms/s")


def format_duration(t: SimTime) -> str:
    for unit, mult in (("s", NS_PER_S), ("ms", NS_PER_MS), ("us", NS_PER_US)):
        if t.ns % mult == 0:
            return f"{t.ns // mult}{unit}"
    return f"{t.ns}ns"


# --------------------------------------------------------------------------
# lexer

@dataclass(frozen=True, slots=True)
class _Token:
    kind: str  # "name" | "int" | "sym" | "eof"
    text: str
    line: int
    col: int


_SYMBOLS = {"{", "}", "[", "]", ";", "*"}


def _lex(source: str, diags: list[ParseDiagnostic]) -> list[_Token]:
    toks: list[_Token] = []
    line, col, i, n = 1, 1, 0, len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue
        start_col = col
        if ch.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            toks.append(_Token("int", source[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            toks.append(_Token("name", source[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if ch in _SYMBOLS:
            toks.append(_Token("sym", ch, line, start_col))
            i += 1
            col += 1
            continue
        if ch == "-" and i + 1 < n and source[i + 1] == ">":
            toks.append(_Token("sym", "->", line, start_col))
            i += 2
            col += 2
            continue
        if ch == "." and i + 1 < n and source[i + 1] == ".":
            toks.append(_Token("sym", "..", line, start_col))
            i += 2
            col += 2
            continue
        diags.append(ParseDiagnostic(Severity.ERROR, line, start_col,
                                     f"unexpected character {ch!r}"))
        i += 1
        col += 1
    toks.append(_Token("eof", "", line, col))
    return toks


# --------------------------------------------------------------------------
# parser

class _StmtError(Exception):
    """Internal: abandon the current statement and resynchronize."""


class _Parser:
    def __init__(self, tokens: list[_Token], diags: list[ParseDiagnostic]):
        self.toks = tokens
        self.pos = 0
        self.diags = diags

    @property
    def cur(self) -> _Token:
        return self.toks[self.pos]

    def advance(self) -> _Token:
        tok = self.toks[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, kind: str, text: Optional[str] = None) -> bool:
        tok = self.cur
        return tok.kind == kind and (text is None or tok.text == text)

    def error(self, message: str, tok: Optional[_Token] = None) -> None:
        tok = tok or self.cur
        self.diags.append(ParseDiagnostic(Severity.ERROR, tok.line, tok.col, message))

    def fail(self, message: str) -> None:
        self.error(message)
        raise _StmtError

    def expect_sym(self, sym: str) -> _Token:
        if not self.at("sym", sym):
            self.fail(f"expected {sym!r}, found {self.cur.text!r}" if self.cur.kind != "eof"
                      else f"expected {sym!r}, found end of input")
        return self.advance()

    def expect_close_bracket(self, open_tok: _Token) -> _Token:
        """Like expect_sym("]") but blames the unclosed '[' itself."""
        if not self.at("sym", "]"):
            self.error("unclosed '[' (expected ']')", open_tok)
            raise _StmtError
        return self.advance()

    def expect_name(self, what: str) -> _Token:
        if self.cur.kind != "name":
            self.fail(f"expected {what}, found {self.cur.text!r}"
                      if self.cur.kind != "eof" else f"expected {what}, found end of input")
        return self.advance()

    def expect_keyword(self, word: str) -> _Token:
        if not self.at("name", word):
            self.fail(f"expected {word!r}, found {self.cur.text!r}")
        return self.advance()

    def expect_int(self, what: str) -> int:
        if self.cur.kind != "int":
            self.fail(f"expected {what}, found {self.cur.text!r}"
                      if self.cur.kind != "eof" else f"expected {what}, found end of input")
        return int(self.advance().text)

    def parse_duration(self) -> SimTime:
        value = self.expect_int("a duration")
        unit_tok = self.cur
        if unit_tok.kind != "name" or unit_tok.text not in DURATION_UNITS:
            self.fail("expected a duration unit (ns/us/ms/s)")
        self.advance()
        try:
            return SimTime(value * DURATION_UNITS[unit_tok.text])
        except SimulationError as exc:
            self.error(str(exc), unit_tok)
            raise _StmtError from None

    def parse_selector(self) -> Selector:
        name = self.expect_name("a node name").text
        if not self.at("sym", "["):
            return Selector(name)
        open_tok = self.advance()
        if self.at("sym", "*"):
            self.advance()
            self.expect_close_bracket(open_tok)
            return Selector(name, SelectorKind.STAR)
        lo = self.expect_int("an index")
        if self.at("sym", ".."):
            self.advance()
            hi = self.expect_int("an index")
            self.expect_close_bracket(open_tok)
            return Selector(name, SelectorKind.RANGE, lo, hi)
        self.expect_close_bracket(open_tok)
        return Selector(name, SelectorKind.INDEX, lo)

    def sync(self) -> None:
        """Skip to just past the next ';' (or stop before '}' / eof)."""
        while True:
            if self.cur.kind == "eof" or self.at("sym", "}"):
                return
            tok = self.advance()
            if tok.kind == "sym" and tok.text == ";":
                return

    def parse_network(self) -> Optional[NetworkSpec]:
        try:
            self.expect_keyword("network")
            name = self.expect_name("a network name").text
            self.expect_sym("{")
        except _StmtError:
            return None
        spec = NetworkSpec(network_name=name)
        while not self.at("sym", "}") and self.cur.kind != "eof":
            try:
                self.parse_statement(spec)
            except _StmtError:
                self.sync()
        if self.cur.kind == "eof":
            self.error("expected '}' to close the network block")
        else:
            self.advance()
            if self.cur.kind != "eof":
                self.error("trailing input after the network block")
        return spec

    def parse_statement(self, spec: NetworkSpec) -> None:
        tok = self.cur
        if tok.kind != "name":
            self.fail(f"expected a statement, found {tok.text!r}")
        if tok.text in NODE_KEYWORDS:
            self.parse_node_decl(spec)
        elif tok.text == "attach":
            self.parse_attach(spec)
        elif tok.text == "link":
            self.parse_link(spec)
        elif tok.text == "generator":
            self.parse_generator(spec)
        elif tok.text == "run":
            self.parse_run(spec)
        elif tok.text == "seed":
            self.parse_seed(spec)
        else:
            self.fail(f"unknown statement keyword {tok.text!r}")

    def parse_node_decl(self, spec: NetworkSpec) -> None:
        kw = self.advance()
        name = self.expect_name("a node name").text
        count = None
        if self.at("sym", "["):
            open_tok = self.advance()
            count = self.expect_int("a node count")
            self.expect_close_bracket(open_tok)
        self.expect_sym(";")
        spec.node_decls.append(NodeDecl(NODE_KEYWORDS[kw.text], name, count,
                                        line=kw.line, col=kw.col))

    def parse_attach(self, spec: NetworkSpec) -> None:
        kw = self.advance()
        ue = self.parse_selector()
        self.expect_sym("->")
        enb = self.parse_selector()
        self.expect_sym(";")
        spec.attachments.append(AttachDecl(ue, enb, line=kw.line, col=kw.col))

    def parse_link(self, spec: NetworkSpec) -> None:
        kw = self.advance()
        src = self.parse_selector()
        self.expect_sym("->")
        dst = self.parse_selector()
        delay = None
        if self.at("name", "delay"):
            self.advance()
            delay = self.parse_duration()
        self.expect_sym(";")
        spec.links.append(LinkDecl(src, dst, delay, line=kw.line, col=kw.col))

    def parse_generator(self, spec: NetworkSpec) -> None:
        kw = self.advance()
        self.expect_keyword("on")
        target = self.parse_selector()
        self.expect_sym("{")
        options: dict = {}
        while not self.at("sym", "}"):
            if self.cur.kind == "eof":
                self.fail("expected '}' to close the generator block")
            opt = self.expect_name("a generator option").text
            if opt in options:
                self.fail(f"duplicate generator option {opt!r}")
            if opt == "period":
                options["period"] = self.parse_duration()
            elif opt == "start":
                options["start_time"] = self.parse_duration()
            elif opt == "payload":
                if self.at("name", "message"):
                    self.advance()
                    options["payload"] = ("message", 0)
                elif self.at("name", "packet"):
                    self.advance()
                    options["payload"] = ("packet", self.expect_int("a byte count"))
                else:
                    self.fail("expected 'message' or 'packet' after 'payload'")
            else:
                self.fail(f"unknown generator option {opt!r}")
            self.expect_sym(";")
        self.advance()
        kwargs = {}
        if "period" in options:
            kwargs["period"] = options["period"]
        if "start_time" in options:
            kwargs["start_time"] = options["start_time"]
        if "payload" in options:
            which, size = options["payload"]
            kwargs["payload_kind"] = (MessageKind.PACKET if which == "packet"
                                      else MessageKind.CONTROL_MESSAGE)
            kwargs["payload_bytes"] = size
        try:
            config = GeneratorConfig(**kwargs)
        except ValueError as exc:
            self.error(str(exc), kw)
            raise _StmtError from None
        spec.generators.append(GeneratorDecl(target, config, line=kw.line, col=kw.col))

    def parse_run(self, spec: NetworkSpec) -> None:
        kw = self.advance()
        self.expect_keyword("until")
        until = self.parse_duration()
        self.expect_sym(";")
        if spec.until is not None:
            self.error("duplicate 'run until' statement", kw)
            raise _StmtError
        spec.until = until

    def parse_seed(self, spec: NetworkSpec) -> None:
        kw = self.advance()
        value = self.expect_int("a seed value")
        self.expect_sym(";")
        if spec.seed is not None:
            self.error("duplicate 'seed' statement", kw)
            raise _StmtError
        spec.seed = value


def parse(source: str) -> ParseResult:
    """Parse topology source text; never raises on bad input.

    Returns the spec plus any diagnostics. When errors are present the
    spec is withheld (None) but all recoverable problems are reported in
    one pass.
    """
    diags: list[ParseDiagnostic] = []
    tokens = _lex(source, diags)
    spec = _Parser(tokens, diags).parse_network()
    if any(d.is_error for d in diags):
        spec = None
    return ParseResult(spec, diags)


# --------------------------------------------------------------------------
# validation

def _declared(spec: NetworkSpec) -> dict[str, NodeDecl]:
    decls: dict[str, NodeDecl] = {}
    for decl in spec.node_decls:
        decls.setdefault(decl.name, decl)
    return decls


def _resolve(sel: Selector, decls: dict[str, NodeDecl],
             expect_kind: Optional[NodeType] = None) -> Optional[list[str]]:
    """Instance names a selector denotes, or None if it dangles."""
    decl = decls.get(sel.name)
    if decl is None:
        return None
    if expect_kind is not None and decl.kind is not expect_kind:
        return None
    count = decl.count
    if sel.kind is SelectorKind.BARE or sel.kind is SelectorKind.STAR:
        return decl.instances()
    if count is None:
        return None  # indexed selector against a singleton declaration
    if sel.kind is SelectorKind.INDEX:
        if 0 <= sel.lo < count:
            return [f"{sel.name}[{sel.lo}]"]
        return None
    if sel.lo > sel.hi or sel.lo < 0 or sel.hi >= count:
        return None
    return [f"{sel.name}[{i}]" for i in range(sel.lo, sel.hi + 1)]


def resolve_selector(spec: NetworkSpec, sel: Selector,
                     expect_kind: Optional[NodeType] = None) -> Optional[list[str]]:
    """Public selector resolution against a spec's declarations."""
    return _resolve(sel, _declared(spec), expect_kind)


def validate(spec: NetworkSpec) -> list[ParseDiagnostic]:
    """Topology rules; returns one located diagnostic per violation."""
    diags: list[ParseDiagnostic] = []

    def err(line: int, col: int, msg: str) -> None:
        diags.append(ParseDiagnostic(Severity.ERROR, line, col, msg))

    seen: dict[str, NodeDecl] = {}
    for decl in spec.node_decls:
        if decl.name in seen:
            err(decl.line, decl.col, f"duplicate node name {decl.name!r}")
        else:
            seen[decl.name] = decl
        if decl.count is not None and decl.count < 1:
            err(decl.line, decl.col, f"node vector {decl.name!r} must have size >= 1")
    decls = _declared(spec)

    per_kind: dict[NodeType, int] = {kind: 0 for kind in NodeType}
    kind_decls: dict[NodeType, list[NodeDecl]] = {kind: [] for kind in NodeType}
    for decl in decls.values():
        per_kind[decl.kind] += max(decl.count if decl.count is not None else 1, 0)
        kind_decls[decl.kind].append(decl)
    for kind in (NodeType.SGW_MME, NodeType.PDN_GW):
        if per_kind[kind] != 1:
            # point at the surplus declaration when there is one
            where = kind_decls[kind][1:2] or kind_decls[kind][:1]
            line, col = (where[0].line, where[0].col) if where else (1, 1)
            err(line, col,
                f"network needs exactly one {kind.value}, found {per_kind[kind]}")
    if per_kind[NodeType.UE] < 1:
        err(1, 1, "network needs at least one ue")
    if per_kind[NodeType.ENB] < 1:
        err(1, 1, "network needs at least one enb")

    attached: dict[str, int] = {}
    for att in spec.attachments:
        ues = _resolve(att.ue, decls, NodeType.UE)
        if ues is None:
            err(att.line, att.col, f"attach: dangling ue selector {att.ue}")
        enbs = _resolve(att.enb, decls, NodeType.ENB)
        if enbs is None:
            err(att.line, att.col, f"attach: dangling enb selector {att.enb}")
        elif len(enbs) != 1:
            err(att.line, att.col,
                f"attach: {att.enb} names {len(enbs)} enbs, need exactly one")
        if ues:
            for inst in ues:
                attached[inst] = attached.get(inst, 0) + 1
    for decl in decls.values():
        if decl.kind is not NodeType.UE:
            continue
        for inst in decl.instances():
            n = attached.get(inst, 0)
            if n == 0:
                err(decl.line, decl.col, f"unattached ue {inst!r}")
            elif n > 1:
                err(decl.line, decl.col, f"ue {inst!r} attached more than once")

    seen_links: set[tuple[str, str]] = set()
    for link in spec.links:
        src_decl = decls.get(link.src.name)
        dst_decl = decls.get(link.dst.name)
        if src_decl is None or dst_decl is None:
            err(link.line, link.col,
                f"link: unknown node in {link.src} -> {link.dst}")
            continue
        pair = (src_decl.kind, dst_decl.kind)
        if pair not in ((NodeType.ENB, NodeType.SGW_MME),
                        (NodeType.SGW_MME, NodeType.PDN_GW)):
            err(link.line, link.col,
                "link: only enb -> sgw_mme and sgw_mme -> pdn_gw links exist")
            continue
        srcs = _resolve(link.src, decls)
        dsts = _resolve(link.dst, decls)
        if srcs is None or dsts is None:
            err(link.line, link.col, f"link: dangling selector in {link.src} -> {link.dst}")
            continue
        if len(dsts) != 1:
            err(link.line, link.col, f"link: {link.dst} must name exactly one node")
            continue
        for s in srcs:
            key = (s, dsts[0])
            if key in seen_links:
                err(link.line, link.col, f"duplicate link {s} -> {dsts[0]}")
            seen_links.add(key)

    gen_targets: set[str] = set()
    for gen in spec.generators:
        ues = _resolve(gen.target, decls, NodeType.UE)
        if ues is None:
            err(gen.line, gen.col, f"generator: no such ue {gen.target}")
            continue
        for inst in ues:
            if inst in gen_targets:
                err(gen.line, gen.col, f"duplicate generator on ue {inst!r}")
            gen_targets.add(inst)

    if spec.until is None:
        err(1, 1, "missing 'run until' statement")
    elif spec.until.ns <= 0:
        err(1, 1, "'run until' must be positive")

    min_chain = {NodeType.UE: 2, NodeType.ENB: 2}  # air hop needs top + PHY
    for kind, chain in spec.chain_overrides.items():
        if len(chain) < min_chain.get(kind, 1):
            err(1, 1, f"chain override for {kind.value} needs at least "
                      f"{min_chain.get(kind, 1)} layers")
        names = [layer.module_name for layer in chain]
        if len(set(names)) != len(names):
            err(1, 1, f"chain override for {kind.value} repeats a module name")
        reserved = {"generator", "lte_radio"}.intersection(names)
        if reserved:
            err(1, 1, f"chain override for {kind.value} uses reserved module "
                      f"names: {sorted(reserved)}")

    return diags


def effective_links(spec: NetworkSpec) -> list[tuple[str, str, SimTime]]:
    """Declared links plus the default backhaul wiring, in build order.

    Every eNB without a declared link gets a 0-delay link to the single
    S-GW/MME, and the S-GW/MME gets a 0-delay link to the PDN-GW unless
    one was declared.
    """
    decls = _declared(spec)
    zero = SimTime(0)
    out: list[tuple[str, str, SimTime]] = []
    linked_src: set[str] = set()
    sgw_pdn_present = False
    for link in spec.links:
        srcs = _resolve(link.src, decls) or []
        dsts = _resolve(link.dst, decls) or []
        if not dsts:
            continue
        delay = link.delay if link.delay is not None else zero
        for s in srcs:
            out.append((s, dsts[0], delay))
            linked_src.add(s)
            if decls[link.src.name].kind is NodeType.SGW_MME:
                sgw_pdn_present = True
    sgw = next(d for d in decls.values() if d.kind is NodeType.SGW_MME)
    pdn = next(d for d in decls.values() if d.kind is NodeType.PDN_GW)
    sgw_inst = sgw.instances()[0]
    for decl in spec.node_decls:
        if decl.kind is not NodeType.ENB:
            continue
        for inst in decl.instances():
            if inst not in linked_src:
                out.append((inst, sgw_inst, zero))
    if not sgw_pdn_present:
        out.append((sgw_inst, pdn.instances()[0], zero))
    return out


# --------------------------------------------------------------------------
# building

@dataclass
class BuiltNetwork:
    root: CompoundModule
    nodes: dict[str, CompoundModule]
    spec: NetworkSpec

    def simulator(self, seed: Optional[int] = None):
        from .kernel import Simulator
        return Simulator(self.root, seed=self.spec.effective_seed if seed is None else seed)


def build(spec: NetworkSpec) -> BuiltNetwork:
    """Instantiate and wire a validated spec; deterministic and total."""
    problems = [d for d in validate(spec) if d.is_error]
    if problems:
        raise InvalidNetworkSpec(problems)

    decls = _declared(spec)
    gen_config: dict[str, GeneratorConfig] = {}
    for gen in spec.generators:
        for inst in _resolve(gen.target, decls, NodeType.UE):
            gen_config[inst] = gen.config

    root = CompoundModule(spec.network_name, type_name=spec.network_name)
    nodes: dict[str, CompoundModule] = {}
    overrides = spec.chain_overrides
    for decl in spec.node_decls:
        for inst in decl.instances():
            if decl.kind is NodeType.UE:
                node = build_ue(inst, generator_config=gen_config.get(inst),
                                stack=overrides.get(NodeType.UE))
            elif decl.kind is NodeType.ENB:
                node = build_enb(inst, stack=overrides.get(NodeType.ENB))
            elif decl.kind is NodeType.SGW_MME:
                node = build_sgw_mme(inst, stack=overrides.get(NodeType.SGW_MME))
            else:
                node = build_pdn_gw(inst, stack=overrides.get(NodeType.PDN_GW))
            root.add_child(node)
            nodes[inst] = node

    for att in spec.attachments:
        enb_inst = _resolve(att.enb, decls, NodeType.ENB)[0]
        for ue_inst in _resolve(att.ue, decls, NodeType.UE):
            attach_ue(nodes[ue_inst], nodes[enb_inst])

    for src, dst, delay in effective_links(spec):
        channel = ChannelSpec(delay)
        if nodes[src].kind is NodeType.ENB:
            link_enb_to_sgw(nodes[src], nodes[dst], channel)
        else:
            link_sgw_to_pdn(nodes[src], nodes[dst], channel)

    root.assign_ids()
    return BuiltNetwork(root, nodes, spec)


# --------------------------------------------------------------------------
# printing

def format_spec(spec: NetworkSpec) -> str:
    """Canonical source text; parsing it back yields an equal spec."""
    lines = [f"network {spec.network_name} {{"]
    for decl in spec.node_decls:
        suffix = f"[{decl.count}]" if decl.count is not None else ""
        lines.append(f"    {decl.kind.value} {decl.name}{suffix};")
    for att in spec.attachments:
        lines.append(f"    attach {att.ue} -> {att.enb};")
    for link in spec.links:
        delay = f" delay {format_duration(link.delay)}" if link.delay is not None else ""
        lines.append(f"    link {link.src} -> {link.dst}{delay};")
    for gen in spec.generators:
        cfg = gen.config
        opts = [f"period {format_duration(cfg.period)};",
                f"start {format_duration(cfg.start_time)};"]
        if cfg.payload_kind is MessageKind.PACKET:
            opts.append(f"payload packet {cfg.payload_bytes};")
        else:
            opts.append("payload message;")
        lines.append(f"    generator on {gen.target} {{ {' '.join(opts)} }}")
    if spec.until is not None:
        lines.append(f"    run until {format_duration(spec.until)};")
    if spec.seed is not None:
        lines.append(f"    seed {spec.seed};")
    lines.append("}")
    return "\n".join(lines) + "\n"
