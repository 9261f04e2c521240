"""Per-width optimal control amplitude and the corresponding pulse area.

For each control half-width a (in units of tau_p) scan Omega, refine the
maximum, and report the area 2 a Omega sqrt(pi).
"""

import argparse
import math

import numpy as np
from scipy.optimize import minimize_scalar

from lambda_memory.model import Params
from lambda_memory.observables import simulate


def best_omega(base, hi=8.0, n=161):
    grid = np.linspace(0.0, hi, n)
    ps = [simulate(base.with_(omega=o).resolve()).P_s for o in grid]
    i = int(np.argmax(ps))
    res = minimize_scalar(lambda o: -simulate(base.with_(omega=o).resolve()).P_s,
                          bounds=(grid[max(i - 1, 0)], grid[min(i + 1, n - 1)]), method="bounded")
    return float(res.x), -float(res.fun)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--tau", type=float, default=1.0)
    ap.add_argument("--b", type=float, default=0.6)
    ap.add_argument("--topology", default="regular")
    args = ap.parse_args()
    base = Params(gamma_eg=0.9, gamma_es=0.1, b=args.b, tau_p=args.tau, topology=args.topology)
    print("a      omega*   P_s      area")
    for a in (0.1, 0.2, 0.35, 0.5, 0.7, 0.9, 1.2, 1.6):
        om, ps = best_omega(base.with_(a=a))
        print(f"{a:<6.2f} {om:<8.4f} {ps:<8.5f} {2 * a * args.tau * om * math.sqrt(math.pi):.4f}")


if __name__ == "__main__":
    main()
