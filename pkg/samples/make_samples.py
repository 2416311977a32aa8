"""Regenerate the sample files in this directory (deterministic)."""

from pathlib import Path

import numpy as np

from freerank import io
from freerank import linalg as la
from freerank.fixtures import corrupt_iso, line_stratification, line_two_level, sheets_of_point
from freerank.generate import circle_bundle, socle_stratification
from freerank.kbundle import random_two_row, regular_action, FiniteGroup

HERE = Path(__file__).parent


def write(name: str, obj: dict):
    (HERE / name).write_text(io.dumps(obj))


def main():
    write("pv.mod", {"kind": "pv", "prime": 2, "rank_w": 1, "V": [[1]], "shift": 0})
    write("pv2.mod", {"kind": "pv", "prime": 3, "rank_w": 2, "V": [[1], [1]], "shift": 0})
    F = line_two_level(2, 10)
    write("line.mod", io.module_to_json(F.L))
    write("line.frf", io.frf_to_json(F, module="line.mod"))
    write("bad.frf", io.frf_to_json(corrupt_iso(F, 1, 0, 3), module="line.mod"))
    write("line.strat", io.strat_to_json(line_stratification(2, 10)))
    write("socle.strat", io.strat_to_json(socle_stratification(2, 10)))
    write("cover2.bundle", io.bundle_to_json(sheets_of_point(2).bundle))
    write("circle3.bundle", io.bundle_to_json(circle_bundle(3, 3).bundle))
    write("trivial3.kmod", {"kind": "kmodule", "prime": 3, "order": 3, "generator": [[1]]})
    g = regular_action(FiniteGroup.cyclic(3), 3)[1]
    write("regular3.kmod", {"kind": "kmodule", "prime": 3, "order": 3, "generator": io.rows(g)})
    write("tworow.kcx", io.kcomplex_to_json(random_two_row(0, p=3).kc))
    write("w2p3.grp", {"kind": "group", "prime": 3, "degree": 9,
                       "generators": ["(1,2,3)", "(1,4,7)(2,5,8)(3,6,9)"],
                       "subgroups": {"base": ["(1,2,3)", "(4,5,6)", "(7,8,9)"],
                                     "center": ["(1,2,3)(4,5,6)(7,8,9)"]}})
    write("d8.grp", {"kind": "group", "prime": 2, "degree": 4,
                     "generators": ["(1,2)", "(1,3)(2,4)"],
                     "subgroups": {"klein_a": ["(1,2)", "(3,4)"],
                                   "klein_b": ["(1,3)(2,4)", "(1,4)(2,3)"],
                                   "center": ["(1,2)(3,4)"]}})


if __name__ == "__main__":
    main()
