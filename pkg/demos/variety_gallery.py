"""Trace the plane zero sets of variety polynomials for a gallery of
covectors and write them as CSV for plotting.

Run:  python3 demos/variety_gallery.py [OUTDIR]
"""

import os
import sys
from fractions import Fraction

from goh_atlas.freelie import generate_basis
from goh_atlas.goh import goh_polynomials, trace_variety
from goh_atlas.normalform import realize_frame
from goh_atlas.polyfield import martinet_frame

GALLERY = [
    ("martinet_line", None, [0, 0, 1]),
    ("f23_line", 3, [0, 0, 0, 1, 0]),
    ("f23_tilted", 3, [0, 0, Fraction(1, 2), 1, 1]),
    ("f24_circle_like", 4, [0, 0, -1, 0, 0, 1, 0, 1]),
    ("f24_cross", 4, [0, 0, 0, 0, 0, 1, 0, -1]),
]


def main():
    outdir = sys.argv[1] if len(sys.argv) > 1 else "variety-gallery"
    os.makedirs(outdir, exist_ok=True)
    frames = {}
    for name, step, lam in GALLERY:
        if step is None:
            frame = martinet_frame()
        elif step in frames:
            frame = frames[step]
        else:
            frame, _ = realize_frame(generate_basis(2, step))
            frames[step] = frame
        sysm = goh_polynomials(frame, lam)
        poly = sysm.poly(1, 2)
        trace = trace_variety(sysm, window=(-2, 2, -2, 2), resolution=256)
        path = os.path.join(outdir, f"{name}.csv")
        with open(path, "w") as fh:
            fh.write(trace.to_csv())
        sing = len(trace.singular_candidates)
        print(f"{name:16s} F = {str(poly):28s} -> "
              f"{len(trace.polylines)} branch(es), {sing} singular "
              f"candidate(s), wrote {path}")


if __name__ == "__main__":
    main()
