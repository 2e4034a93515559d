"""Instance documents, reports, and diagram export.

An instance document is a JSON object holding either a poset pair with a
contraction map or a ring-backed hom expression, never both. Serialization
is canonical: stable key order, two-space indent, trailing newline, Hasse
pairs only. Reports share the same discipline and never include wall-clock
fields, so a report is byte-stable for fixed inputs regardless of worker
count.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .poset import (
    AntisymmetryViolation,
    DuplicateLabel,
    Poset,
    UnknownLabel,
    covering_pairs,
    height,
    make_poset,
)
from .rings import (
    CharacteristicMismatch,
    NotIdempotent,
    Product,
    RingExpr,
    RingHom,
    Zn,
    make_hom,
    to_spectral_map,
)
from .specmap import (
    PROPERTY_NAMES,
    TOP,
    NotMonotone,
    SpectralMap,
    check_layer,
    make_spectral_map,
    properties_summary,
)
from .theorems import (
    THEOREM_STATEMENTS,
    Counterexample,
    TheoremId,
    Verdict,
)


class DocumentSyntaxError(ValueError):
    """Malformed document text; carries a 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class DocumentSemanticError(ValueError):
    """Well-formed text that does not describe a valid instance."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


_TOP_LITERAL = "TOP"


@dataclass(frozen=True)
class InstanceDocument:
    """A named spectral-map instance, possibly ring-backed.

    `ring` holds the canonical hom expression when the instance came from a
    ring document; `violation` is an optional passthrough block written by
    report builders so counterexample dumps stay parseable.
    """

    smap: SpectralMap
    name: str | None = None
    seed: int | None = None
    ring: str | None = None
    violation: dict | None = field(default=None, compare=False)


# ---------------------------------------------------------------------------
# Ring expression grammar
#
#   ring := "Zn" "(" INT ")" | "Product" "(" ring ("," ring)* ")"
#   hom  := "hom" "(" "m" "=" INT "," "target" "=" ring "," "e" "=" elem ")"
#   elem := INT | "(" INT ("," INT)* ")"
#
# Nested products flatten and one-factor products collapse, so every parse
# lands on the canonical constructor forms.


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _location(self, pos: int) -> tuple[int, int]:
        line = self.text.count("\n", 0, pos) + 1
        column = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, column

    def error(self, message: str, pos: int | None = None):
        line, column = self._location(self.pos if pos is None else pos)
        raise DocumentSyntaxError(message, line, column)

    def _skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self._skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take_symbol(self, symbol: str):
        self._skip_ws()
        if not self.text.startswith(symbol, self.pos):
            self.error(f"expected {symbol!r}")
        self.pos += len(symbol)

    def take_ident(self) -> str:
        self._skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isalpha():
            self.pos += 1
        if start == self.pos:
            self.error("expected a name")
        return self.text[start:self.pos]

    def take_int(self) -> int:
        self._skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.error("expected an integer")
        return int(self.text[start:self.pos])

    def expect_end(self):
        self._skip_ws()
        if self.pos < len(self.text):
            self.error("unexpected trailing text")


def _parse_ring(tokens: _Tokens) -> RingExpr:
    start = tokens.pos
    name = tokens.take_ident()
    if name == "Zn":
        tokens.take_symbol("(")
        n = tokens.take_int()
        tokens.take_symbol(")")
        if n < 2:
            raise DocumentSemanticError(
                f"cyclic ring modulus must be at least 2, got {n}",
                *tokens._location(start),
            )
        return Zn(n)
    if name == "Product":
        tokens.take_symbol("(")
        factors = [_parse_ring(tokens)]
        while tokens.peek() == ",":
            tokens.take_symbol(",")
            factors.append(_parse_ring(tokens))
        tokens.take_symbol(")")
        flat: list[Zn] = []
        for f in factors:
            flat.extend(f.factors if isinstance(f, Product) else [f])
        return flat[0] if len(flat) == 1 else Product(tuple(flat))
    tokens.error("expected Zn or Product", start)


def _parse_elem(tokens: _Tokens):
    if tokens.peek() == "(":
        tokens.take_symbol("(")
        parts = [tokens.take_int()]
        while tokens.peek() == ",":
            tokens.take_symbol(",")
            parts.append(tokens.take_int())
        tokens.take_symbol(")")
        return tuple(parts)
    return tokens.take_int()


def parse_ring_expr(text: str) -> RingExpr:
    """Parse `Zn(12)` or `Product(Zn(2),Zn(3))`."""
    tokens = _Tokens(text)
    ring = _parse_ring(tokens)
    tokens.expect_end()
    return ring


def parse_hom_expr(text: str) -> RingHom:
    """Parse and validate `hom(m=6, target=Zn(2), e=1)`."""
    tokens = _Tokens(text)
    start = tokens.pos
    if tokens.take_ident() != "hom":
        tokens.error("expected hom(...)", start)
    tokens.take_symbol("(")
    if tokens.take_ident() != "m":
        tokens.error("expected m=...")
    tokens.take_symbol("=")
    m = tokens.take_int()
    tokens.take_symbol(",")
    if tokens.take_ident() != "target":
        tokens.error("expected target=...")
    tokens.take_symbol("=")
    target = _parse_ring(tokens)
    tokens.take_symbol(",")
    if tokens.take_ident() != "e":
        tokens.error("expected e=...")
    tokens.take_symbol("=")
    e = _parse_elem(tokens)
    tokens.take_symbol(")")
    tokens.expect_end()
    try:
        return make_hom(m, target, e)
    except (NotIdempotent, CharacteristicMismatch, ValueError) as exc:
        raise DocumentSemanticError(str(exc)) from exc


def ring_expr_text(ring: RingExpr) -> str:
    if isinstance(ring, Zn):
        return f"Zn({ring.n})"
    return "Product(" + ",".join(ring_expr_text(f) for f in ring.factors) + ")"


def elem_text(e) -> str:
    if isinstance(e, tuple):
        return "(" + ",".join(str(a) for a in e) + ")"
    return str(e)


def hom_text(h: RingHom) -> str:
    return f"hom(m={h.m}, target={ring_expr_text(h.target)}, e={elem_text(h.e)})"


# ---------------------------------------------------------------------------
# Instance documents


def _poset_block(p: Poset) -> dict:
    return {
        "labels": list(p.labels),
        "pairs": sorted(
            [p.labels[i], p.labels[j]] for i, j in covering_pairs(p)
        ),
    }


def _map_block(m: SpectralMap) -> dict:
    out = {}
    for q, v in enumerate(m.assignment):
        out[m.r_poset.labels[q]] = (
            _TOP_LITERAL if v is TOP else m.s_poset.labels[v]
        )
    return out


def instance_dict(doc: InstanceDocument) -> dict:
    """Canonical JSON object for a document, stable key order."""
    out: dict = {}
    if doc.name is not None:
        out["name"] = doc.name
    if doc.seed is not None:
        out["seed"] = doc.seed
    if doc.ring is not None:
        out["ring"] = doc.ring
    else:
        out["s"] = _poset_block(doc.smap.s_poset)
        out["r"] = _poset_block(doc.smap.r_poset)
        out["map"] = _map_block(doc.smap)
    if doc.violation is not None:
        out["violation"] = doc.violation
    return out


def serialize_instance(doc: InstanceDocument) -> str:
    return json.dumps(instance_dict(doc), indent=2) + "\n"


def _require_type(value, want, what: str):
    if not isinstance(value, want) or isinstance(value, bool):
        raise DocumentSemanticError(f"{what} must be a {want.__name__}")
    return value


def _parse_poset_block(block, what: str) -> Poset:
    if not isinstance(block, dict):
        raise DocumentSemanticError(f"{what} must be an object")
    unknown = set(block) - {"labels", "pairs"}
    if unknown:
        raise DocumentSemanticError(
            f"unknown keys in {what}: {', '.join(sorted(unknown))}"
        )
    labels = block.get("labels")
    if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
        raise DocumentSemanticError(f"{what}.labels must be a list of strings")
    if _TOP_LITERAL in labels:
        raise DocumentSemanticError(
            f"{what}.labels may not use the reserved label {_TOP_LITERAL!r}"
        )
    pairs = block.get("pairs", [])
    if not isinstance(pairs, list):
        raise DocumentSemanticError(f"{what}.pairs must be a list")
    clean = []
    for pair in pairs:
        if not (isinstance(pair, list) and len(pair) == 2
                and all(isinstance(x, str) for x in pair)):
            raise DocumentSemanticError(
                f"each entry of {what}.pairs must be a [low, high] label pair"
            )
        clean.append((pair[0], pair[1]))
    try:
        return make_poset(labels, clean)
    except (DuplicateLabel, UnknownLabel, AntisymmetryViolation) as exc:
        raise DocumentSemanticError(f"{what}: {exc}") from exc


def parse_instance(text: str) -> InstanceDocument:
    """Parse and validate an instance document.

    Syntax problems raise DocumentSyntaxError with a line and column;
    well-formed JSON that fails validation raises DocumentSemanticError.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentSyntaxError(exc.msg, exc.lineno, exc.colno) from exc
    if not isinstance(data, dict):
        raise DocumentSemanticError("instance document must be a JSON object")
    unknown = set(data) - {"name", "seed", "s", "r", "map", "ring", "violation"}
    if unknown:
        raise DocumentSemanticError(
            "unknown keys: " + ", ".join(sorted(unknown))
        )

    name = data.get("name")
    if name is not None:
        _require_type(name, str, "name")
    seed = data.get("seed")
    if seed is not None:
        _require_type(seed, int, "seed")
    violation = data.get("violation")
    if violation is not None and not isinstance(violation, dict):
        raise DocumentSemanticError("violation must be an object")

    has_ring = "ring" in data
    has_posets = any(k in data for k in ("s", "r", "map"))
    if has_ring and has_posets:
        raise DocumentSemanticError(
            "document must use either a ring block or a poset pair, not both"
        )
    if has_ring:
        ring_text = _require_type(data["ring"], str, "ring")
        hom = parse_hom_expr(ring_text)
        return InstanceDocument(
            smap=to_spectral_map(hom),
            name=name,
            seed=seed,
            ring=hom_text(hom),
            violation=violation,
        )

    missing = [k for k in ("s", "r", "map") if k not in data]
    if missing:
        raise DocumentSemanticError(
            "poset documents need s, r and map blocks; missing: "
            + ", ".join(missing)
        )
    s = _parse_poset_block(data["s"], "s")
    r = _parse_poset_block(data["r"], "r")
    map_block = data["map"]
    if not isinstance(map_block, dict):
        raise DocumentSemanticError("map must be an object")
    if set(map_block) != set(r.labels):
        missing_keys = sorted(set(r.labels) - set(map_block))
        extra_keys = sorted(set(map_block) - set(r.labels))
        parts = []
        if missing_keys:
            parts.append("unmapped r elements: " + ", ".join(missing_keys))
        if extra_keys:
            parts.append("unknown r elements: " + ", ".join(extra_keys))
        raise DocumentSemanticError("map block mismatch; " + "; ".join(parts))
    assignment: list = [None] * r.n
    for q_label, value in map_block.items():
        if not isinstance(value, str):
            raise DocumentSemanticError(
                f"map value for {q_label!r} must be a label or {_TOP_LITERAL!r}"
            )
        if value == _TOP_LITERAL:
            assignment[r.index(q_label)] = TOP
        else:
            try:
                assignment[r.index(q_label)] = s.index(value)
            except UnknownLabel as exc:
                raise DocumentSemanticError(f"map: {exc}") from exc
    try:
        smap = make_spectral_map(s, r, assignment)
    except NotMonotone as exc:
        raise DocumentSemanticError(f"map: {exc}") from exc
    return InstanceDocument(smap=smap, name=name, seed=seed, violation=violation)


def document_for_map(m: SpectralMap, name: str | None = None) -> InstanceDocument:
    return InstanceDocument(smap=m, name=name)


def document_for_hom(h: RingHom, name: str | None = None) -> InstanceDocument:
    return InstanceDocument(
        smap=to_spectral_map(h), name=name, ring=hom_text(h)
    )


# ---------------------------------------------------------------------------
# Reports


def _counterexample_dict(cx: Counterexample) -> dict:
    doc = InstanceDocument(
        smap=cx.smap,
        name="counterexample",
        violation={
            "theorem": cx.theorem.name if isinstance(cx.theorem, TheoremId) else cx.theorem,
            "waived": cx.waived,
            **cx.detail,
        },
    )
    return instance_dict(doc)


def _verdict_dict(v: Verdict) -> dict:
    theorem = v.theorem.name if isinstance(v.theorem, TheoremId) else v.theorem
    out = {
        "theorem": theorem,
        "statement": THEOREM_STATEMENTS.get(v.theorem, ""),
        "holds": v.holds,
        "instances_checked": v.instances_checked,
        "note": v.note,
        "counterexample": (
            _counterexample_dict(v.counterexample) if v.counterexample else None
        ),
    }
    return out


def build_check_report(doc: InstanceDocument, max_layer: int | None = None) -> dict:
    """Properties and layer results for one instance."""
    m = doc.smap
    if max_layer is None:
        max_layer = height(m.s_poset)
    layers = {str(n): check_layer(m, n) for n in range(1, max_layer + 1)}
    return {
        "command": "check",
        "instance": instance_dict(doc),
        "properties": properties_summary(m),
        "layers": layers,
    }


def build_verify_report(
    doc: InstanceDocument | None,
    verdicts: list[Verdict],
    bounds: dict | None = None,
) -> dict:
    out: dict = {"command": "verify"}
    if doc is not None:
        out["mode"] = "instance"
        out["instance"] = instance_dict(doc)
    else:
        out["mode"] = "exhaustive"
        out["bounds"] = bounds
    out["theorems"] = [_verdict_dict(v) for v in verdicts]
    out["all_hold"] = all(v.holds for v in verdicts)
    return out


def build_search_report(spec, witness: SpectralMap | None) -> dict:
    witness_dict = None
    if witness is not None:
        witness_doc = InstanceDocument(
            smap=witness,
            name="witness",
            violation={
                "goal": spec.goal,
                "required": sorted(spec.required),
            },
        )
        witness_dict = instance_dict(witness_doc)
    return {
        "command": "search",
        "spec": {
            "required": sorted(spec.required),
            "goal": spec.goal,
            "max_s": spec.max_s,
            "max_r": spec.max_r,
            "d_size": spec.d_size,
            "seed": spec.seed,
        },
        "found": witness is not None,
        "witness": witness_dict,
    }


def build_spec_report(ring: RingExpr, poset: Poset) -> dict:
    return {
        "command": "spec",
        "ring": ring_expr_text(ring),
        "labels": list(poset.labels),
        "pairs": sorted(
            [poset.labels[i], poset.labels[j]] for i, j in covering_pairs(poset)
        ),
    }


def serialize_report(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Text rendering


def _bool_word(b: bool) -> str:
    return "true" if b else "false"


def render_check_text(report: dict) -> str:
    lines = []
    props = report["properties"]
    for name in PROPERTY_NAMES:
        lines.append(f"{name}: {_bool_word(props[name])}")
    lines.append(f"unitary: {_bool_word(props['unitary'])}")
    for n, value in report["layers"].items():
        lines.append(f"layer-{n}: {_bool_word(value)}")
    return "\n".join(lines) + "\n"


def render_verify_text(report: dict) -> str:
    lines = []
    for entry in report["theorems"]:
        status = "holds" if entry["holds"] else "FAILED"
        line = (
            f"{entry['theorem']}: {status} "
            f"({entry['instances_checked']} instances)"
        )
        if entry["note"]:
            line += f" [{entry['note']}]"
        lines.append(line)
        if entry["counterexample"] is not None:
            lines.append(
                "  counterexample: " + entry["counterexample"]["violation"]["clause"]
            )
    lines.append(
        "all hold" if report["all_hold"] else "violations found"
    )
    return "\n".join(lines) + "\n"


def render_search_text(report: dict) -> str:
    if not report["found"]:
        return "no witness within bounds\n"
    witness = report["witness"]
    lines = ["witness found:"]
    lines.append("  s labels: " + ", ".join(witness["s"]["labels"]))
    lines.append(
        "  s pairs: "
        + ("; ".join(f"{a} < {b}" for a, b in witness["s"]["pairs"]) or "(antichain)")
    )
    lines.append("  r labels: " + ", ".join(witness["r"]["labels"]))
    lines.append(
        "  r pairs: "
        + ("; ".join(f"{a} < {b}" for a, b in witness["r"]["pairs"]) or "(antichain)")
    )
    lines.append(
        "  map: "
        + "; ".join(f"{q} -> {p}" for q, p in witness["map"].items())
    )
    return "\n".join(lines) + "\n"


def render_spec_text(report: dict) -> str:
    lines = [f"spec {report['ring']}:"]
    for label in report["labels"]:
        lines.append(f"  {label}")
    if report["pairs"]:
        for a, b in report["pairs"]:
            lines.append(f"  {a} < {b}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# DOT export


def _dot_quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(doc: InstanceDocument) -> str:
    """Hasse diagram of both posets plus dashed contraction edges.

    Order edges point upward (rankdir BT); TOP appears as a box node only
    when some element contracts to it.
    """
    m = doc.smap
    s, r = m.s_poset, m.r_poset
    lines = ["digraph instance {", "  rankdir=BT;"]
    for tag, p in (("s", s), ("r", r)):
        lines.append(f"  subgraph cluster_{tag} {{")
        lines.append(f"    label={_dot_quote(tag)};")
        for label in p.labels:
            node = _dot_quote(f"{tag}:{label}")
            lines.append(f"    {node} [label={_dot_quote(label)}];")
        for i, j in sorted(covering_pairs(p)):
            low = _dot_quote(f"{tag}:{p.labels[i]}")
            high = _dot_quote(f"{tag}:{p.labels[j]}")
            lines.append(f"    {low} -> {high};")
        lines.append("  }")
    if any(v is TOP for v in m.assignment):
        lines.append(f"  {_dot_quote(_TOP_LITERAL)} [shape=box];")
    for q, v in enumerate(m.assignment):
        src = _dot_quote(f"r:{r.labels[q]}")
        dst = _dot_quote(_TOP_LITERAL if v is TOP else f"s:{s.labels[v]}")
        lines.append(f"  {src} -> {dst} [style=dashed, constraint=false];")
    lines.append("}")
    return "\n".join(lines) + "\n"
