#!/usr/bin/env python3
"""Convert the pipe-delimited KnotInfo dump shipped by the `database_knotinfo`
Python package into the comma-separated summary export read by `knotineq import`.

Polynomial columns are reduced to the integer summary quantities the tool
consumes (Alexander span, Jones span, HOMFLYPT z-degree and a-spread, Kauffman
a-spread). Everything else is copied through with light syntax cleanup.

    pip download database_knotinfo --no-deps -d /tmp/dki
    python3 -m zipfile -e /tmp/dki/database_knotinfo-*.whl /tmp/dki
    python3 scripts/knotinfo_export.py \
        /tmp/dki/database_knotinfo/csv_data/knotinfo_data_complete.csv \
        data/local/knotinfo.csv --max-crossings 13
"""
import argparse
import csv
import re
import sys

csv.field_size_limit(10**9)

PLAIN = [
    ("crossing_number", "Crossing Number"),
    ("unknotting_number", "Unknotting Number"),
    ("three_genus", "Three Genus"),
    ("bridge_index", "Bridge Index"),
    ("braid_index", "Braid Index"),
    ("signature", "Signature"),
    ("arc_index", "Arc Index"),
    ("smooth_four_genus", "Smooth Four Genus"),
    ("rasmussen_invariant", "Rasmussen Invariant"),
    ("ozsvath_szabo_tau_invariant", "Ozsvath-Szabo Tau"),
    ("fd_clasp_number", "4D Clasp Number"),
    ("td_clasp_number", "Clasp Number"),
    ("double_slice_genus", "Doubly Slice Genus"),
]


class Poly:
    """Sparse Laurent polynomial: {exponent tuple: integer coefficient}."""

    def __init__(self, terms, nvars):
        self.nvars = nvars
        self.terms = {k: v for k, v in terms.items() if v != 0}

    @classmethod
    def const(cls, c, nvars):
        return cls({(0,) * nvars: c}, nvars)

    def __add__(self, o):
        t = dict(self.terms)
        for k, v in o.terms.items():
            t[k] = t.get(k, 0) + v
        return Poly(t, self.nvars)

    def __neg__(self):
        return Poly({k: -v for k, v in self.terms.items()}, self.nvars)

    def __mul__(self, o):
        t = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in o.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                t[k] = t.get(k, 0) + v1 * v2
        return Poly(t, self.nvars)

    def pow(self, n):
        if n >= 0:
            r = Poly.const(1, self.nvars)
            for _ in range(n):
                r = r * self
            return r
        if len(self.terms) != 1:
            raise ValueError("negative power of a non-monomial")
        (k, v), = self.terms.items()
        if abs(v) != 1:
            raise ValueError("negative power of a non-unit monomial")
        return Poly({tuple(e * n for e in k): v ** (-n)}, self.nvars)

    def exponents(self, var):
        return sorted({k[var] for k in self.terms})


TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z]+)|(.))")


class Parser:
    def __init__(self, text, variables):
        self.vars = variables
        self.toks = []
        for num, name, op in TOKEN.findall(text.replace("\\", "")):
            if num:
                self.toks.append(("num", int(num)))
            elif name:
                if name not in variables:
                    raise ValueError(f"unexpected variable {name!r}")
                self.toks.append(("var", name))
            elif op.strip():
                self.toks.append(("op", op))
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def parse(self):
        p = self.expr()
        if self.i != len(self.toks):
            raise ValueError(f"trailing tokens at {self.i}: {self.toks[self.i:]}")
        return p

    def expr(self):
        sign = 1
        if self.peek() == ("op", "-"):
            self.take()
            sign = -1
        elif self.peek() == ("op", "+"):
            self.take()
        p = self.term()
        if sign < 0:
            p = -p
        while self.peek() in (("op", "+"), ("op", "-")):
            _, op = self.take()
            t = self.term()
            p = p + t if op == "+" else p + (-t)
        return p

    def term(self):
        p = self.power()
        while True:
            nxt = self.peek()
            if nxt == ("op", "*"):
                self.take()
                p = p * self.power()
            elif nxt == ("op", "/"):
                self.take()
                p = p * self.power().pow(-1)
            elif nxt[0] in ("var", "num") or nxt == ("op", "("):
                p = p * self.power()
            else:
                return p

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            base = base.pow(self.exponent())
        return base

    def exponent(self):
        kind, val = self.take()
        if kind == "num":
            return val
        if (kind, val) == ("op", "("):
            sign = 1
            if self.peek() == ("op", "-"):
                self.take()
                sign = -1
            kind, val = self.take()
            if kind != "num" or self.take() != ("op", ")"):
                raise ValueError("bad exponent")
            return sign * val
        if (kind, val) == ("op", "-"):
            kind, val = self.take()
            return -val
        raise ValueError(f"bad exponent token {val!r}")

    def atom(self):
        kind, val = self.take()
        n = len(self.vars)
        if kind == "num":
            return Poly.const(val, n)
        if kind == "var":
            k = [0] * n
            k[self.vars.index(val)] = 1
            return Poly({tuple(k): 1}, n)
        if (kind, val) == ("op", "("):
            p = self.expr()
            if self.take() != ("op", ")"):
                raise ValueError("unbalanced parenthesis")
            return p
        if (kind, val) == ("op", "-"):
            return -self.atom()
        raise ValueError(f"unexpected token {val!r}")


def span(text, variables, var):
    e = Parser(text, variables).parse().exponents(variables.index(var))
    return e[-1] - e[0]


def max_degree(text, variables, var):
    return Parser(text, variables).parse().exponents(variables.index(var))[-1]


def clean_range(cell):
    cell = cell.strip()
    if not cell:
        return ""
    cell = cell.replace(" ", "")
    if cell.startswith("[") and cell.endswith("]"):
        return cell
    return cell


def mosaic_number(cell):
    # "[ 4 , 12 ]" is (mosaic number, tile number); "[ [7,infty) , ... ]" is a lower bound.
    cell = cell.replace(" ", "")
    if not cell:
        return ""
    m = re.match(r"^\[(\d+),", cell)
    if m:
        return m.group(1)
    m = re.match(r"^\[\[(\d+),infty\)", cell)
    if m:
        return f"[{m.group(1)},inf]"
    raise ValueError(f"unrecognised mosaic cell {cell!r}")


def vector_span(vec):
    # Alexander/Jones vectors: [min, max, coeffs...]
    v = [int(x) for x in re.findall(r"-?\d+", vec)]
    return v[1] - v[0]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("source")
    ap.add_argument("dest")
    ap.add_argument("--max-crossings", type=int, default=13)
    ap.add_argument("--check-vectors", action="store_true",
                    help="cross-check parsed spans against the vector columns where present")
    args = ap.parse_args()

    with open(args.source, newline="") as f:
        reader = csv.reader(f, delimiter="|")
        header = next(reader)
        col = {name: i for i, name in enumerate(header)}
        rows = list(reader)

    out_header = ["Name"] + [h for _, h in PLAIN] + [
        "Mosaic Number",
        "Alexander Span",
        "Jones Span",
        "HOMFLYPT z-Degree",
        "HOMFLYPT a-Spread",
        "Kauffman a-Spread",
    ]
    written = 0
    mismatches = 0
    with open(args.dest, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(out_header)
        for row in rows:
            name = row[col["name"]]
            c = row[col["crossing_number"]]
            if not c.isdigit() or int(c) == 0 or int(c) > args.max_crossings:
                continue
            out = [name] + [clean_range(row[col[k]]) for k, _ in PLAIN]
            out.append(mosaic_number(row[col["mosaic_tile_number"]]))
            alex = span(row[col["alexander_polynomial"]], ["t"], "t")
            jones = span(row[col["jones_polynomial"]], ["t"], "t")
            homfly = row[col["homfly_polynomial"]]
            kauff = row[col["kauffman_polynomial"]]
            if args.check_vectors:
                av = row[col["alexander_polynomial_vector"]]
                jv = row[col["jones_polynomial_vector"]]
                if av and vector_span(av) != alex:
                    mismatches += 1
                    print(f"{name}: alexander {alex} vs vector {vector_span(av)}", file=sys.stderr)
                if jv and vector_span(jv) != jones:
                    mismatches += 1
                    print(f"{name}: jones {jones} vs vector {vector_span(jv)}", file=sys.stderr)
            out += [
                alex,
                jones,
                max_degree(homfly, ["v", "z"], "z"),
                span(homfly, ["v", "z"], "v"),
                span(kauff, ["a", "z"], "a"),
            ]
            w.writerow(out)
            written += 1
    print(f"wrote {written} knots to {args.dest}", file=sys.stderr)
    if mismatches:
        print(f"{mismatches} span mismatches", file=sys.stderr)
        sys.exit(1)


if __name__ == "__main__":
    main()
