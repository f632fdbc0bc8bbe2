"""Wave/particle morphing: marginal visibility and entanglement versus alpha.

    python scripts/morphing_curve.py --points 11 --vartheta 1.0
"""

import argparse

import numpy as np

from qdce.cli import marginal_visibility
from qdce.hilbert import TwoQubitDensity
from qdce.measurement import concurrence, joint_distribution
from qdce.protocol import ProtocolParams, final_two_atom_state


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, default=11)
    ap.add_argument("--vartheta", type=float, default=1.0)
    ap.add_argument("--convention", default="hamiltonian")
    args = ap.parse_args()

    print(f"{'alpha':>8} {'V_sim':>10} {'sin^2':>10} {'C':>10}   P(S,A)")
    for alpha in np.linspace(0, np.pi / 2, args.points):
        psi = final_two_atom_state(ProtocolParams(alpha, args.vartheta, 2, args.convention))
        vis = marginal_visibility(float(alpha), 2, 0.0, args.convention)
        conc = concurrence(TwoQubitDensity.from_state(psi))
        probs = " ".join(f"{p:.4f}" for p in joint_distribution(psi))
        print(f"{alpha:8.4f} {vis:10.6f} {np.sin(alpha) ** 2:10.6f} {conc:10.6f}   {probs}")


if __name__ == "__main__":
    main()
