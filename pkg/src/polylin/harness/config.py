"""Suite configuration files (INI).

Grammar::

    [suite]
    name = my-suite            ; optional label
    methods = companion, w     ; optional, default: all five

    [problem <name>]           ; one section per problem, in file order
    n = 4                      ; required
    d = 2
    layout = random_dense      ; random_dense | prescribed | mass_spring | degenerate
    profile = balanced         ; balanced | stress
    seed = 3                   ; added to 1000 * (--seed)
    complex = false
    stress_ratio = 1e6
    spectrum = 1, 2, 3+1j, ... ; prescribed layout, n*d values
    zero_rows = 1              ; degenerate layout
"""

from __future__ import annotations

import configparser

from ..errors import FormatError
from .compare import METHODS
from .problems import ProblemSpec

_KEYS = {"n", "d", "layout", "profile", "seed", "complex", "stress_ratio", "spectrum", "zero_rows"}


def load_suite_config(path, seed=0):
    """``(specs, methods)`` from an INI file."""
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except configparser.Error as exc:
        raise FormatError(f"{path}: {exc}") from exc
    methods = METHODS
    if cp.has_section("suite") and cp.has_option("suite", "methods"):
        methods = tuple(m.strip() for m in cp.get("suite", "methods").split(",") if m.strip())
        bad = set(methods) - set(METHODS)
        if bad:
            raise FormatError(f"{path}: unknown methods {sorted(bad)}")
    specs = []
    for sec in cp.sections():
        if not sec.startswith("problem"):
            if sec != "suite":
                raise FormatError(f"{path}: unexpected section [{sec}]")
            continue
        name = sec[len("problem"):].strip() or f"problem{len(specs)}"
        s = cp[sec]
        extra = set(s.keys()) - _KEYS
        if extra:
            raise FormatError(f"{path}: [{sec}] unknown keys {sorted(extra)}")
        if "n" not in s:
            raise FormatError(f"{path}: [{sec}] missing n")
        try:
            spectrum = tuple(complex(v.strip().replace(" ", "")) for v in s.get("spectrum", "").split(",") if v.strip())
            specs.append(ProblemSpec(
                name=name,
                n=s.getint("n"),
                d=s.getint("d", 2),
                layout=s.get("layout", "random_dense"),
                profile=s.get("profile", "balanced"),
                seed=1000 * int(seed) + s.getint("seed", len(specs)),
                complex=s.getboolean("complex", False),
                stress_ratio=s.getfloat("stress_ratio", 1e6),
                spectrum=spectrum,
                zero_rows=s.getint("zero_rows", 1),
            ))
        except ValueError as exc:
            raise FormatError(f"{path}: [{sec}] {exc}") from exc
    if not specs:
        raise FormatError(f"{path}: no [problem ...] sections")
    return specs, methods
