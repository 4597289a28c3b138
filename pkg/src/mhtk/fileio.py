"""Plain-text loaders for monoids, multi-hypersubstitutions and equation sets.

Formats (``#`` starts a comment everywhere):

monoid file::

    monoid explicit          # or k1, k2, full
    [swap]
    f -> f(x2,x1)

Blocks list explicit elements; symbols missing from a block map to
themselves.  With a predicate kind the blocks are optional extras.

ρ file::

    monoid explicit          # a kind, or a path to a monoid file
    default: f -> f(x1,x2)   # required for every symbol
    1: f -> f(x2,x1)         # symbols missing for a color use the default

equation file: one ``lhs = rhs`` per line.
"""

from __future__ import annotations

import os

from .hypersub import PREDICATES, Hypersubstitution, Monoid, MonoidError
from .multihyp import MultiHypersubstitution
from .terms import Identity, MhtkError, Signature, parse_identity, parse_term, render_term


class FormatError(MhtkError, ValueError):
    pass


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _mapping_line(lineno: int, line: str, sig: Signature):
    if "->" not in line:
        raise FormatError(f"line {lineno}: expected 'f -> term', got {line!r}")
    f, t = (s.strip() for s in line.split("->", 1))
    if f not in sig:
        raise FormatError(f"line {lineno}: unknown symbol {f!r}")
    return f, parse_term(t, sig)


def parse_monoid(text: str, sig: Signature) -> Monoid:
    kind = None
    header_seen = False
    blocks: list[tuple[str, dict]] = []
    for lineno, line in _lines(text):
        if line.startswith("monoid"):
            if header_seen:
                raise FormatError(f"line {lineno}: second monoid header")
            parts = line.split()
            if len(parts) != 2:
                raise FormatError(f"line {lineno}: expected 'monoid explicit|k1|k2|full'")
            header_seen = True
            kind = None if parts[1] == "explicit" else parts[1]
            if kind is not None and kind not in PREDICATES:
                raise FormatError(f"line {lineno}: unknown monoid kind {parts[1]!r}")
        elif line.startswith("[") and line.endswith("]"):
            blocks.append((line[1:-1].strip(), {}))
        else:
            if not blocks:
                raise FormatError(f"line {lineno}: mapping outside a [name] block")
            f, t = _mapping_line(lineno, line, sig)
            if f in blocks[-1][1]:
                raise FormatError(f"line {lineno}: {f} mapped twice in block [{blocks[-1][0]}]")
            blocks[-1][1][f] = t
    if not header_seen:
        raise FormatError("missing 'monoid ...' header")
    elements = [Hypersubstitution(sig, mp) for _, mp in blocks]
    names = tuple(name for name, _ in blocks)
    if kind is None:
        if not elements:
            raise FormatError("an explicit monoid needs at least one [name] block")
        return Monoid(sig, tuple(elements), None, names)
    return Monoid(sig, tuple(elements), kind, names)


def render_monoid(m: Monoid) -> str:
    lines = [f"monoid {m.kind or 'explicit'}"]
    for k, s in enumerate(m.elements):
        name = m.names[k] if k < len(m.names) and m.names[k] else f"e{k + 1}"
        lines.append(f"[{name}]")
        lines.extend(f"{f} -> {render_term(s.mapping[f])}" for f in m.sig.symbols)
    return "\n".join(lines) + "\n"


def parse_rho(text: str, sig: Signature, base_dir: str = ".") -> MultiHypersubstitution:
    monoid = None
    default: dict = {}
    table: dict[int, dict] = {}
    for lineno, line in _lines(text):
        if line.startswith("monoid"):
            parts = line.split(None, 1)
            if len(parts) != 2:
                raise FormatError(f"line {lineno}: expected 'monoid <kind|path>'")
            kind = parts[1].strip()
            if kind == "explicit":
                monoid = None
            elif kind in PREDICATES:
                monoid = Monoid.predicate(sig, kind)
            else:
                path = kind if os.path.isabs(kind) else os.path.join(base_dir, kind)
                try:
                    with open(path, encoding="utf-8") as fh:
                        monoid = parse_monoid(fh.read(), sig)
                except OSError as exc:
                    raise FormatError(f"line {lineno}: cannot read monoid file {kind!r}: {exc}") from None
            continue
        key, sep, rest = line.partition(":")
        if not sep:
            raise FormatError(f"line {lineno}: expected 'color: f -> term' or 'default: f -> term'")
        f, t = _mapping_line(lineno, rest.strip(), sig)
        key = key.strip()
        if key == "default":
            target = default
        elif key.isdigit():
            target = table.setdefault(int(key), {})
        else:
            raise FormatError(f"line {lineno}: color must be a natural number or 'default', got {key!r}")
        if f in target:
            raise FormatError(f"line {lineno}: {f} mapped twice for {key}")
        target[f] = t
    missing = [f for f in sig.symbols if f not in default]
    if missing:
        raise FormatError(f"default entry missing for {missing}")
    default_h = Hypersubstitution(sig, default)
    entries = {q: Hypersubstitution(sig, {**default, **mp}) for q, mp in table.items()}
    if monoid is None:
        # an inline explicit monoid: exactly the hypersubstitutions listed
        elems = [default_h] + [s for s in entries.values()]
        monoid = Monoid.explicit(elems)
    try:
        return MultiHypersubstitution(entries, default_h, monoid)
    except MonoidError as exc:
        raise FormatError(str(exc)) from None


def render_rho(rho: MultiHypersubstitution) -> str:
    lines = [f"monoid {rho.monoid.kind or 'explicit'}"]
    lines += [f"default: {f} -> {render_term(rho.default.mapping[f])}" for f in rho.sig.symbols]
    for q, s in rho.table.items():
        lines += [f"{q}: {f} -> {render_term(s.mapping[f])}" for f in rho.sig.symbols]
    return "\n".join(lines) + "\n"


def parse_equations(text: str, sig: Signature | None = None) -> list[Identity]:
    out = []
    for lineno, line in _lines(text):
        try:
            out.append(parse_identity(line, sig))
        except MhtkError as exc:
            raise FormatError(f"line {lineno}: {exc}") from None
    return out


def render_equations(eqs) -> str:
    return "".join(f"{e}\n" for e in eqs)
