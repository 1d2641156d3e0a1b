"""Bit-exact text interchange format for hypergraphs.

Line 1 is ``k n m`` as ASCII decimals separated by single spaces; then m
lines of k space-separated vertex ids.  Every edge is sorted ascending, the
edge list is sorted lexicographically, lines end with LF, and there is no
trailing whitespace.  Readers reject any deviation.
"""

from __future__ import annotations

from .core import Hypergraph, validate


class HgrFormatError(ValueError):
    """The file is not in canonical form."""


def dumps(H: Hypergraph) -> str:
    lines = [f"{H.k} {H.n} {H.m}"]
    lines.extend(" ".join(str(v) for v in edge) for edge in H.edges)
    return "\n".join(lines) + "\n"


def write_hgr(H: Hypergraph, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(dumps(H))


def _ints(line: str, what: str) -> list[int]:
    parts = line.split(" ")
    if any(not part or not part.isdigit() for part in parts):
        raise HgrFormatError(f"{what}: tokens must be decimals separated by single spaces")
    return [int(p) for p in parts]


def loads(text: str) -> Hypergraph:
    if not text.endswith("\n"):
        raise HgrFormatError("file must end with a newline")
    if "\r" in text:
        raise HgrFormatError("file must use LF line endings")
    lines = text.split("\n")[:-1]
    if not lines:
        raise HgrFormatError("missing header")
    header = _ints(lines[0], "header")
    if len(header) != 3:
        raise HgrFormatError("header must be 'k n m'")
    k, n, m = header
    if len(lines) - 1 != m:
        raise HgrFormatError(f"expected {m} edge lines, found {len(lines) - 1}")
    edges = []
    for lineno, line in enumerate(lines[1:], start=2):
        ids = _ints(line, f"line {lineno}")
        if len(ids) != k:
            raise HgrFormatError(f"line {lineno}: expected {k} vertex ids")
        if any(a >= b for a, b in zip(ids, ids[1:])):
            raise HgrFormatError(f"line {lineno}: edge must be strictly increasing")
        edges.append(tuple(ids))
    for prev, cur in zip(edges, edges[1:]):
        if prev >= cur:
            raise HgrFormatError("edge list must be sorted lexicographically")
    return validate(edges, n=n, k=k)


def read_hgr(path) -> Hypergraph:
    with open(path, "r", newline="") as fh:
        return loads(fh.read())
