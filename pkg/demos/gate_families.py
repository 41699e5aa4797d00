"""Logic gates from scattering amplitude pairs.

An SU(1,1) pair (a, b) with |a|^2 - |b|^2 = 1 is the monodromy datum of a
1-D scatterer; the map tau turns it into the symmetric unitary S-matrix
[[conj(b)/a, 1/a], [1/a, -b/a]].  Some gates are hit exactly, others only
in the limit of a discrete family.  This script prints both stories.
"""

import numpy as np

from scattergate import HADAMARD, NOT_GATE, gate_distance, phase_gate, tau


def main():
    # the pair (sqrt 2, 1) produces the Hadamard gate exactly
    h = tau(np.sqrt(2.0), 1.0)
    print("tau(sqrt 2, 1) =")
    print(np.array_str(h.real, precision=6, suppress_small=True))
    print(f"max |tau - H| = {np.max(np.abs(h - HADAMARD)):.2e}\n")

    # diag(1, -1) is not reachable exactly: 1/a = 0 forces |a| -> inf.
    # The family a = sqrt(n^2+1), b = n walks there at rate ~ 1/n.
    print(" n   distance to diag(1,-1)")
    for n in (1, 2, 5, 10, 30, 100):
        g = tau(np.sqrt(n * n + 1.0), float(n), atol=1e-8)
        print(f"{n:3d}   {gate_distance(g, NOT_GATE):.6f}")

    # rotating b by e^{i phi/2} steers the limit to a phase gate; the
    # family converges to diag(1, -e^{i phi}), the sign riding on -b/a
    phi = np.pi / 3.0
    target = phase_gate(phi + np.pi)
    print(f"\n n   distance to diag(1, -e^(i pi/3))")
    for n in (1, 10, 100):
        g = tau(np.sqrt(n * n + 1.0), -n * np.exp(0.5j * phi), atol=1e-8)
        print(f"{n:3d}   {gate_distance(g, target):.6f}")


if __name__ == "__main__":
    main()
