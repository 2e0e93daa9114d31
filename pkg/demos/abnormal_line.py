"""Walk through the rank-2 step-3 story end to end.

Realizes the free nilpotent frame on R^5, confirms that its higher
brackets commute, builds the variety polynomial for a vertical covector,
lifts the line kappa(t) = (0, t), and recovers the annihilating covector
from trajectory data alone.

Run:  python3 demos/abnormal_line.py
"""

import numpy as np

from goh_atlas.freelie import generate_basis
from goh_atlas.goh import goh_polynomials, trace_variety, variety_membership
from goh_atlas.metabelian import is_metabelian
from goh_atlas.normalform import realize_frame
from goh_atlas.trajectories import (
    SampledCurve,
    extremal_residuals,
    horizontal_lift,
    recover_abnormal_covector,
)


def main():
    basis = generate_basis(2, 3)
    frame, maps = realize_frame(basis)
    print(f"Realized the rank-2 step-3 frame on R^{frame.n}.")
    print(f"  X_2 = {frame.fields[1]}")

    verdict = is_metabelian(frame, depth=6)
    print(f"Brackets of weight >= 2 commute: {verdict.metabelian}")

    # covector dual to the weight-3 direction produced by [X_1,[X_1,X_2]]
    lam = [0.0, 0.0, 0.0, 1.0, 0.0]
    sysm = goh_polynomials(frame, lam)
    print(f"Variety polynomial for that covector: F = {sysm.poly(1, 2)}")
    trace = trace_variety(sysm, resolution=128)
    print(f"Traced zero set: {len(trace.polylines)} branch(es); "
          "it is the vertical axis x1 = 0.")

    kappa = SampledCurve.from_function(lambda t: (0.0, t), 0.0, 1.0, 400)
    print(f"Base curve inside the zero set: sup |F| along it = "
          f"{variety_membership(sysm, kappa):.1e}")

    curve, control = horizontal_lift(frame, kappa, [0.0] * frame.n)
    rec = recover_abnormal_covector(frame, control, [0.0] * frame.n)
    cand = rec.candidates[0]
    print(f"Recovered {len(rec.candidates)} covector candidate from the "
          f"lift: {np.round(cand, 12)}")
    print(f"  (singular values span {rec.singular_values[0]:.2e} .. "
          f"{rec.singular_values[-1]:.2e})")

    rep = extremal_residuals(frame, control, [0.0] * frame.n, cand)
    print(f"Re-validated along the lift: sup frame pairing "
          f"{rep.sup_abnormal:.1e}, sup bracket pairing {rep.sup_goh:.1e}")
    print("The line is abnormal, and the recovered covector agrees with "
          "the hand computation (the fourth coordinate direction).")


if __name__ == "__main__":
    main()
