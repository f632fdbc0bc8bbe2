"""Fit the wave-branch interference phase against the dispersive phase.

    python scripts/phase_mapping.py --points 17
"""

import argparse

import numpy as np

from qdce.dynamics import CONVENTIONS
from qdce.protocol import PAPER_OFFSET, PAPER_SLOPE, fit_phase_mapping


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, default=9)
    ap.add_argument("--alpha", type=float, default=np.pi / 4)
    args = ap.parse_args()

    grid = np.linspace(0, 2 * np.pi, args.points)
    print(f"claimed: phi = {PAPER_SLOPE} * vartheta + {PAPER_OFFSET:.6f}")
    for conv in CONVENTIONS:
        m = fit_phase_mapping(grid, args.alpha, convention=conv)
        print(f"{conv:>12}: phi = {m.slope:+.9f} * vartheta + {m.offset:.9f}"
              f"   residual {m.residual:.1e}   affine={m.is_affine}")


if __name__ == "__main__":
    main()
