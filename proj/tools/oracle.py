#!/usr/bin/env python3
"""Independent numpy/scipy reference for the values frozen in tests/.

Builds everything from scratch (no code shared with the C++ library):
signal states and the filtered two-qubit state by direct summation, outcome
probabilities by enumerating Bob's projectors, the M = 2 phase error bound
as a linear program solved by scipy, and the BB84 threshold by root finding.

    python3 tools/oracle.py
"""

import numpy as np
from scipy.optimize import brentq, linprog

I2 = np.eye(2, dtype=complex)
# Working basis is the x basis; the z kets are the Hadamard combinations.
SX = np.diag([1.0, -1.0]).astype(complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.array([[0, 1], [1, 0]], dtype=complex)
Z0 = np.array([1, 1], dtype=complex) / np.sqrt(2)
Z1 = np.array([1, -1], dtype=complex) / np.sqrt(2)


def rot(b):
    return np.array([[np.cos(b), -np.sin(b)], [np.sin(b), np.cos(b)]], dtype=complex)


def signal(m, bit, M, th):
    s = 1 if bit == 0 else -1
    return rot(m * np.pi / M) @ np.array([np.cos(th / 2), s * np.sin(th / 2)], dtype=complex)


def rho_ab(M, th, kraus):
    psi0 = (np.kron(Z0, signal(0, 0, M, th)) + np.kron(Z1, signal(0, 1, M, th))) / np.sqrt(2)
    f0 = np.diag([np.sin(th / 2), np.cos(th / 2)]).astype(complex)
    r = np.zeros((4, 4), dtype=complex)
    for E in kraus:
        for l in range(M):
            v = np.kron(I2, f0 @ rot(-l * np.pi / M) @ E @ rot(l * np.pi / M)) @ psi0
            r += np.outer(v, v.conj())
    r /= M
    t = np.trace(r).real
    return r / t, t


def bell(r):
    pp = (np.kron(Z0, Z0) + np.kron(Z1, Z1)) / np.sqrt(2)
    sp = (np.kron(Z0, Z1) + np.kron(Z1, Z0)) / np.sqrt(2)
    sm = (np.kron(Z0, Z1) - np.kron(Z1, Z0)) / np.sqrt(2)
    pm = (np.kron(Z0, Z0) - np.kron(Z1, Z1)) / np.sqrt(2)
    return [float((v.conj() @ r @ v).real) for v in (pp, sp, sm, pm)]


def povm(M, th, kraus):
    """Conclusive and conclusive-error probability per basis-matched signal."""
    pc = perr = 0.0
    for m in range(M):
        for bit in (0, 1):
            v = signal(m, bit, M, th)
            rin = sum(E @ np.outer(v, v.conj()) @ E.conj().T for E in kraus)
            for keep, decoded in ((signal(m, 0, M, th), 1), (signal(m, 1, M, th), 0)):
                proj = rot(np.pi / 2) @ keep
                pr = (proj.conj() @ rin @ proj).real / (4 * M)
                pc += pr
                perr += pr if decoded != bit else 0.0
    return pc, perr


def depolarizing(p):
    return [np.sqrt(1 - 3 * p / 4) * I2, np.sqrt(p / 4) * SX, np.sqrt(p / 4) * SY,
            np.sqrt(p / 4) * SZ]


def amplitude_damping(g):
    # |1_z> decays to |0_z>.
    e0 = np.outer(Z0, Z0) + np.sqrt(1 - g) * np.outer(Z1, Z1)
    e1 = np.sqrt(g) * np.outer(Z0, Z1)
    return [e0.astype(complex), e1.astype(complex)]


def m2_bound_lp(th, e_b):
    """max e_p over Pauli weights (a_i, a_x, a_y, a_z) >= 0 with M = 2 constraints."""
    s2, c2 = np.sin(th) ** 2, np.cos(th) ** 2
    # Variables w = (ai, ax, ay, az). Normalized so that the state trace is 1:
    #   s2 (ai + ax) + (1 + c2)(ay + az) = 1
    #   e_b = s2 ax + ay + c2 az   (p_x + p_y)
    #   e_p = (1 + c2)(ay + az)    (p_y + p_z)
    res = linprog(c=[0, 0, -(1 + c2), -(1 + c2)],
                  A_eq=[[s2, s2, 1 + c2, 1 + c2], [0, s2, 1, c2]], b_eq=[1, e_b],
                  bounds=[(0, None)] * 4, method="highs")
    return -res.fun


def main():
    np.set_printoptions(precision=17)
    th = np.pi / 4
    r, t = rho_ab(4, th, depolarizing(0.1))
    b = bell(r)
    print("depolarizing(0.1) M=4 pi/4 bell", [repr(x) for x in b], "trace", repr(t))
    print("  povm", povm(4, th, depolarizing(0.1)))
    r, t = rho_ab(4, th, [rot(0.1)])
    b = bell(r)
    print("rotation(0.1) M=4 pi/4 p_con", repr(t), "e_b", repr(b[1] + b[2]),
          "e_p", repr(b[2] + b[3]))
    r, t = rho_ab(4, 1.0, amplitude_damping(0.2))
    b = bell(r)
    print("amplitude_damping(0.2) M=4 theta=1 bell", [repr(x) for x in b], "trace", repr(t))
    r, t = rho_ab(2, 0.7, depolarizing(0.1))
    b = bell(r)
    print("depolarizing(0.1) M=2 theta=0.7 bell", [repr(x) for x in b], "trace", repr(t))
    r, t = rho_ab(3, np.pi / 3, [SX])
    print("sigma_x M=3 pi/3 bell", [repr(x) for x in bell(r)], "trace", repr(t))
    print("rho depolarizing(0.1) M=4 pi/4 real part:")
    print(rho_ab(4, th, depolarizing(0.1))[0].real)
    print("m2 LP:")
    for th2, e_b in ((np.pi / 4, 0.1), (np.pi / 4, 0.2), (0.4, 0.05), (1.0, 0.1), (np.pi / 4, 0.5),
                     (np.pi / 3, 0.1)):
        print("  theta", repr(th2), "e_b", e_b, "e_p_max", repr(m2_bound_lp(th2, e_b)))
    h2 = lambda e: -e * np.log2(e) - (1 - e) * np.log2(1 - e)
    print("bb84 threshold", repr(brentq(lambda e: 1 - 2 * h2(e), 1e-6, 0.5, xtol=1e-15)))
    print("H2(0.11)", repr(h2(0.11)))
    x = [0.7, 0.1, 0.15, 0.05]
    print("H4", repr(-sum(v * np.log2(v) for v in x)))


if __name__ == "__main__":
    main()
