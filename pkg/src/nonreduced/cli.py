"""Command-line front end.

Problem files::

    # Example: three monomials
    ring z1 z2 ; nil w1 w2
    ideal: w1^2, w2^2, w1*w2
    option p = 0, 1

``nil`` separates the coordinates on Z from the transversal ones.  Output
is either a human-readable tree or ``key = value`` lines with sorted keys.
Exit status: 0 success, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .algebra.ideal import Ideal
from .algebra.ring import ParseError, Ring, parse_polynomial
from .barlet import BarletError, barlet_data, completeness_check, noetherian_operators, to_diff_operators
from .exterior import render_form
from .homalg import HomalgError, cm_report, ext_module, free_resolution, purity_test, rank_loci
from .kaehler import KaehlerError, jhat_presentation, kaehler_module, oz_generators, strong_forms
from .pairing import PairingError, duality_report, generic_injectivity, t_matrix

COMMANDS = ("resolve", "ext", "cm", "kaehler", "strong-forms", "barlet", "noetherian", "verify", "pairing", "report")
OPTION_KEYS = ("p", "M", "seed", "trials", "format")


class InputError(ValueError):
    pass


@dataclass
class ProblemSpec:
    zvars: Tuple[str, ...]
    wvars: Tuple[str, ...]
    generators: List[str]
    options: Dict[str, Any] = field(default_factory=dict)

    @property
    def ring(self) -> Ring:
        return Ring(self.zvars, self.wvars)

    def ideal(self) -> Ideal:
        ring = self.ring
        return Ideal(ring, [parse_polynomial(ring, g) for g in self.generators])

    @property
    def degrees(self) -> List[int]:
        p = self.options.get("p", [0])
        return list(p)

    def render(self) -> str:
        lines = ["ring " + " ".join(self.zvars) + " ; nil " + " ".join(self.wvars),
                 "ideal: " + ", ".join(self.generators)]
        for k in OPTION_KEYS:
            if k in self.options:
                v = self.options[k]
                text = ", ".join(map(str, v)) if isinstance(v, list) else str(v)
                lines.append(f"option {k} = {text}")
        return "\n".join(lines) + "\n"


def _split_commas(text: str, col0: int):
    """Top-level comma split keeping 1-based column offsets."""
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append((text[start:i], col0 + start))
            start = i + 1
    parts.append((text[start:], col0 + start))
    out = []
    for s, c in parts:
        lead = len(s) - len(s.lstrip())
        out.append((s.strip(), c + lead))
    return out


def _option_value(key: str, raw: str, line: int, col: int):
    if key == "format":
        if raw not in ("human", "machine"):
            raise ParseError(f"format must be human or machine, got {raw!r}", line, col)
        return raw
    try:
        if key == "p":
            return [int(x) for x in raw.split(",")]
        return int(raw)
    except ValueError:
        raise ParseError(f"option {key} needs an integer, got {raw!r}", line, col) from None


def parse_problem(text: str) -> ProblemSpec:
    zvars = wvars = None
    gens: List[str] = []
    options: Dict[str, Any] = {}
    pending: List[Tuple[str, int, int]] = []
    seen_ideal = False
    ideal_pos = (1, 1)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        body = line.lstrip()
        col0 = len(line) - len(body) + 1
        if body.startswith("ring ") or body == "ring":
            head, sep, tail = body[4:].partition(";")
            tail = tail.strip()
            if not sep or not (tail.startswith("nil ") or tail == "nil"):
                raise ParseError("ring declaration must read 'ring z... ; nil w...'", lineno, col0)
            zvars = tuple(head.split())
            wvars = tuple(tail[3:].split())
            try:
                Ring(zvars, wvars)
            except ValueError as exc:
                raise ParseError(str(exc), lineno, col0) from None
        elif body.startswith("ideal:"):
            seen_ideal = True
            ideal_pos = (lineno, col0)
            rest = body[6:]
            pending.extend((s, lineno, c) for s, c in _split_commas(rest, col0 + 6))
        elif body.startswith("option "):
            key, eq, val = body[7:].partition("=")
            key = key.strip()
            if not eq:
                raise ParseError("option lines read 'option key = value'", lineno, col0)
            if key not in OPTION_KEYS:
                raise ParseError(f"unknown option {key!r}", lineno, col0 + 7)
            options[key] = _option_value(key, val.strip(), lineno, col0 + body.index("=") + 1)
        elif seen_ideal and pending and pending[-1][0] == "":
            # continuation of a generator list ending in a comma
            pending.pop()
            pending.extend((s, lineno, c) for s, c in _split_commas(body, col0))
        else:
            raise ParseError(f"unrecognized line {body!r}", lineno, col0)
    if zvars is None:
        raise ParseError("ring declaration required", 1, 1)
    if not seen_ideal or all(not s for s, _, _ in pending):
        raise ParseError("empty ideal", *ideal_pos)
    ring = Ring(zvars, wvars)
    for s, ln, c in pending:
        if not s:
            raise ParseError("empty generator", ln, c)
        parse_polynomial(ring, s, ln, c)
        gens.append(s)
    return ProblemSpec(zvars, wvars, gens, options)


def bundled_problem(name: str) -> Optional[str]:
    stem = name[:-5] if name.endswith(".prob") else name
    try:
        ref = resources.files("nonreduced").joinpath("problems", stem + ".prob")
        if ref.is_file():
            return ref.read_text(encoding="utf-8")
    except (FileNotFoundError, ModuleNotFoundError):
        pass
    return None


def load_problem(path: str) -> ProblemSpec:
    p = Path(path)
    if p.is_file():
        text = p.read_text(encoding="utf-8")
    else:
        text = bundled_problem(p.name)
        if text is None:
            raise InputError(f"no such problem file: {path}")
    return parse_problem(text)


# ---------------------------------------------------------------------------
# commands


def _forms(ring, forms):
    return [render_form(ring, f) for f in forms]


def cmd_resolve(J, p, opts):
    pres = strong_forms(J, p, seed=opts["seed"])
    res = free_resolution(pres.module(), max_len=opts.get("max_len"))
    out = {"betti": list(res.ranks), "length": res.length, "complete": res.complete,
           "maps": {j: res.f(j).render() for j in range(1, res.length + 1)}}
    if res.complete:
        loci = rank_loci(res)
        pure, codims = purity_test(res, J.ring.kappa, loci)
        out["pure"] = pure
        out["loci_codims"] = dict(codims)
        out["loci_method"] = loci.method
    return out, True


def cmd_ext(J, p, opts):
    pres = strong_forms(J, p, seed=opts["seed"])
    res = free_resolution(pres.module(), max_len=opts.get("max_len"))
    out = {}
    for k in range(0, J.ring.N + 1):
        if k > res.length + 1 or (k > res.length and not res.complete):
            continue
        E = ext_module(res, k)
        out[k] = {"zero": E.is_zero, "generators": E.kernel.ncols}
    return {"ext": out}, True


def cmd_cm(J, p, opts):
    pres = strong_forms(J, p, seed=opts["seed"])
    rep = cm_report(pres.module())
    return {"cm": rep.cm, "length": rep.length, "kappa": rep.kappa, "ext_vanishing": rep.ext_vanishing,
            "exact_flag": rep.exact_flag, "consistent": rep.consistent}, rep.consistent


def cmd_kaehler(J, p, opts):
    ring = J.ring
    jh = jhat_presentation(J, p)
    km = kaehler_module(J, p)
    pres = strong_forms(J, p, seed=opts["seed"])
    out = {"jhat": _forms(ring, jh.forms()), "kaehler_rank": km.rank,
           "torsion": _forms(ring, pres.torsion)}
    try:
        oz = oz_generators(J, p, strong=pres, seed=opts["seed"])
        out["oz"] = {"M": oz.M, "nu": oz.nu, "free": oz.free, "generic_rank": oz.generic_rank,
                     "generators": oz.render()}
    except KaehlerError as exc:
        out["oz"] = {"skipped": str(exc)}
    return out, True


def cmd_strong_forms(J, p, opts):
    pres = strong_forms(J, p, seed=opts["seed"])
    return {"generators": _forms(J.ring, pres.forms()), "torsion": _forms(J.ring, pres.torsion)}, True


def cmd_barlet(J, p, opts):
    d = barlet_data(J, p, opts["seed"], M=opts.get("M"))
    return {"M": d.M, "count": len(d.generators), "generators": [g.render() for g in d.generators],
            "betti": list(d.resolution.ranks), "chain_map": d.chain.verify()}, True


def cmd_noetherian(J, p, opts):
    d = barlet_data(J, p, opts["seed"], M=opts.get("M"))
    ops = noetherian_operators(J, p, data=d)
    return {"count": len(ops), "operators": [o.render() for o in ops],
            "direct": [o.render() for o in to_diff_operators(d.generators, p)]}, True


def cmd_verify(J, p, opts):
    d = barlet_data(J, p, opts["seed"], M=opts.get("M"))
    ops = noetherian_operators(J, p, data=d)
    rep = completeness_check(ops, J, p, trials=opts["trials"], seed=opts["seed"], strong=d.strong)
    return {"operators": len(ops), "members_checked": rep.members_checked,
            "nonmembers_checked": rep.nonmembers_checked, "passed": rep.passed,
            "failures": rep.member_failures + rep.nonmember_failures}, rep.passed


def cmd_pairing(J, p, opts):
    T = t_matrix(J, p, opts["seed"], M=opts.get("M"))
    v = generic_injectivity(T)
    return {"rows": T.matrix.nrows, "cols": T.nu, "basis": T.basis_kind, "rank": v.rank,
            "injective": v.injective, "matrix": T.render()}, v.injective


def cmd_report(J, p, opts):
    rep = duality_report(J, p, seed=opts["seed"], trials=opts["trials"], M=opts.get("M"))
    ok = rep["cm"]["consistent"] and rep["noetherian"]["passed"] and rep["pairing"]["injective"]
    return rep, ok


HANDLERS = {
    "resolve": cmd_resolve, "ext": cmd_ext, "cm": cmd_cm, "kaehler": cmd_kaehler,
    "strong-forms": cmd_strong_forms, "barlet": cmd_barlet, "noetherian": cmd_noetherian,
    "verify": cmd_verify, "pairing": cmd_pairing, "report": cmd_report,
}


# ---------------------------------------------------------------------------
# output


def _scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, tuple)) and all(isinstance(x, (int, bool)) for x in v):
        return "[" + ", ".join(_scalar(x) for x in v) + "]"
    return str(v)


def _sort_key(k):
    return (0, k, "") if isinstance(k, int) else (1, 0, str(k))


def flatten(tree, prefix: str = "") -> List[Tuple[str, str]]:
    out = []
    if isinstance(tree, dict):
        for k in sorted(tree, key=_sort_key):
            out.extend(flatten(tree[k], f"{prefix}.{k}" if prefix else str(k)))
    elif isinstance(tree, (list, tuple)) and not all(isinstance(x, (int, bool)) for x in tree):
        width = len(str(max(len(tree) - 1, 0)))
        if not tree:
            out.append((prefix, "[]"))
        for i, x in enumerate(tree):
            out.extend(flatten(x, f"{prefix}.{i:0{width}d}"))
    else:
        out.append((prefix, _scalar(tree)))
    return out


def render_machine(tree) -> str:
    return "".join(f"{k} = {v}\n" for k, v in flatten(tree))


def render_human(tree, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(tree, dict):
        for k in sorted(tree, key=_sort_key):
            v = tree[k]
            if isinstance(v, (dict, list)) and v and not (
                    isinstance(v, list) and all(isinstance(x, (int, bool)) for x in v)):
                lines.append(f"{pad}{k}:")
                lines.append(render_human(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v) if v not in ([], {}) else '(none)'}")
    elif isinstance(tree, list):
        for x in tree:
            if isinstance(x, (dict, list)):
                lines.append(f"{pad}-")
                lines.append(render_human(x, indent + 1))
            else:
                lines.append(f"{pad}- {x}")
    else:
        lines.append(pad + _scalar(tree))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# entry point


def run(command: str, spec: ProblemSpec, p_values: Optional[Sequence[int]] = None, seed: Optional[int] = None,
        trials: Optional[int] = None, max_len: Optional[int] = None) -> Tuple[int, Dict[str, Any], str]:
    """Execute ``command``; returns ``(exit status, tree, error message)``."""
    if command not in HANDLERS:
        return 2, {}, f"unknown command {command!r}"
    opts = {
        "seed": spec.options.get("seed", 0) if seed is None else seed,
        "trials": spec.options.get("trials", 100) if trials is None else trials,
        "M": spec.options.get("M"),
        "max_len": max_len,
    }
    ps = list(p_values) if p_values is not None else spec.degrees
    try:
        J = spec.ideal()
    except ParseError as exc:
        return 2, {}, str(exc)
    tree: Dict[str, Any] = {"command": command}
    status = 0
    for p in ps:
        if not 0 <= p <= J.ring.N:
            return 2, {}, f"form degree {p} out of range 0..{J.ring.N}"
        try:
            res, ok = HANDLERS[command](J, p, opts)
        except (KaehlerError, BarletError, PairingError, HomalgError) as exc:
            return 2, {}, str(exc)
        tree[f"p{p}"] = res
        if not ok:
            status = 1
    return status, tree, ""


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nonreduced", description="Invariants of non-reduced spaces with smooth reduction.")
    ap.add_argument("--input", required=True, help="problem file, or a bundled name such as ex71")
    ap.add_argument("--command", required=True, choices=COMMANDS)
    ap.add_argument("--p", type=int, action="append", help="form degree (repeatable)")
    ap.add_argument("--format", choices=("human", "machine"))
    ap.add_argument("--seed", type=int)
    ap.add_argument("--trials", type=int)
    ap.add_argument("--max-len", type=int, dest="max_len")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        spec = load_problem(args.input)
    except (ParseError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    status, tree, err = run(args.command, spec, args.p, args.seed, args.trials, args.max_len)
    if err:
        print(f"error: {err}", file=sys.stderr)
        return status
    fmt = args.format or spec.options.get("format", "human")
    text = render_machine(tree) if fmt == "machine" else render_human(tree) + "\n"
    sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
