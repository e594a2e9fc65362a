"""Independent reference values for the C++ unit tests.

Blade algebra by brute force on index tuples (permutation parity from an
explicit sort), no shared code with the library. Run with python3; the
printed numbers are frozen into test_tensor_algebra.cpp, test_field_config.cpp
and test_angular_momentum.cpp.
"""
import itertools
import math
import cmath


def parity(seq):
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def sigma(I, J):
    if set(I) & set(J):
        return 0
    return parity(tuple(I) + tuple(J))


class Space:
    def __init__(self, k, n):
        self.k, self.n, self.d = k, n, k + n

    def delta(self, I):
        s = 1
        for i in I:
            if i < self.k:
                s = -s
        return s

    def blades(self, g):
        return list(itertools.combinations(range(self.d), g))

    def wedge(self, a, b):
        out = {}
        for I, x in a.items():
            for J, y in b.items():
                s = sigma(I, J)
                if s:
                    K = tuple(sorted(I + J))
                    out[K] = out.get(K, 0) + s * x * y
        return out

    def linterior(self, a, b):
        out = {}
        for J, x in a.items():
            for I, y in b.items():
                if set(J) <= set(I):
                    R = tuple(i for i in I if i not in J)
                    s = self.delta(J) * sigma(R, J)
                    out[R] = out.get(R, 0) + s * x * y
        return out

    def rinterior(self, a, b):
        ga = len(next(iter(a))) if a else 0
        gb = len(next(iter(b))) if b else 0
        s = (-1) ** (gb * (ga + gb))
        return {K: s * v for K, v in self.linterior(b, a).items()}

    def dot(self, a, b):
        return sum(self.delta(I) * x * b.get(I, 0) for I, x in a.items())

    def e(self, *idx):
        return {tuple(idx): 1}

    def stress(self, F):
        d = self.d
        T = [[0j] * d for _ in range(d)]
        for i in range(d):
            ei = {(i,): self.delta((i,))}
            u = self.linterior(ei, F)
            wi = self.wedge(ei, F)
            for j in range(d):
                ej = {(j,): self.delta((j,))}
                v = self.rinterior(F, ej)
                wj = self.wedge(F, ej)
                T[i][j] = -0.5 * (self.dot(u, v) + self.dot(wi, wj))
        return T


def fmt(z):
    if isinstance(z, complex):
        return f"{z.real:.17g} {z.imag:.17g}"
    return f"{z:.17g}"


def stress_cases():
    print("# stress tensors")
    sp = Space(1, 3)
    F = {(0, 1): 0.3 - 0.1j, (0, 2): -0.7, (0, 3): 0.2 + 0.5j, (1, 2): 1.1, (1, 3): -0.4j, (2, 3): 0.25}
    T = sp.stress(F)
    for i in range(4):
        print("(1,3)", i, " ".join(fmt(T[i][j]) for j in range(4)))
    sp = Space(2, 3)
    F = {(0, 1, 2): 0.5, (0, 3, 4): -0.25 + 0.5j, (1, 2, 4): 0.75, (2, 3, 4): -1.0, (0, 2, 3): 0.125j}
    T = sp.stress(F)
    for i in range(5):
        print("(2,3)", i, " ".join(fmt(T[i][j]) for j in range(5)))


# two hand-built modes in (1,3), ell = 0, r = 2
MODES = [
    ((0.0, 0.2, -0.1, 0.9), 0.03, {(1,): 0.4 + 0.3j, (2,): -0.2 + 0.1j, (3,): (0.2 * (0.4 + 0.3j) - 0.1 * (-0.2 + 0.1j)) / -0.9 * -1}),
    ((0.0, -0.5, 0.3, 0.4), 0.05, {(1,): 0.1j, (2,): 0.6, (3,): 0.0}),
]


def gauge_fix(sp, xi, amp):
    # enforce xi_spatial . amp = 0 by adjusting the e3 component (spatial ell = 0 case)
    s = sum(xi[t] * amp.get((t,), 0) for t in (1, 2))
    amp = dict(amp)
    amp[(3,)] = -s / xi[3]
    return amp


def modes(sp):
    out = []
    for xb, w, amp in MODES:
        amp = gauge_fix(sp, xb, amp)
        q = sum(sp.delta((t,)) * xb[t] ** 2 for t in range(4))
        chi = math.sqrt(-sp.delta((0,)) * q)
        xp = list(xb)
        xp[0] = chi
        out.append((xb, xp, chi, w, amp))
    return out


def mode_cases():
    sp = Space(1, 3)
    r = 2
    sl = sigma((0,), (1, 2, 3))
    ms = modes(sp)
    print("# modes: xi_bar, weight, amp e0..e3 (re im)")
    for xb, xp, chi, w, amp in ms:
        print("mode", " ".join(fmt(v) for v in xb), fmt(w), " ".join(fmt(complex(amp.get((t,), 0))) for t in range(4)))
    Pi = [0.0] * 4
    for xb, xp, chi, w, amp in ms:
        n2 = sum(sp.delta(K) * abs(v) ** 2 for K, v in amp.items())
        for t in range(4):
            Pi[t] += 4 * math.pi ** 2 * (-1) ** r * sl * w / (2 * chi) * xp[t] * n2
    print("Pi", " ".join(fmt(v) for v in Pi))
    for I in [(1, 2), (1, 3), (2, 3)]:
        i, j = I
        tot = 0j
        for xb, xp, chi, w, amp in ms:
            s = 0j
            for L in sp.blades(r - 2):
                if set(L) & {i, j}:
                    continue
                sg = sp.delta(L) * sigma(L, (i,)) * sigma((j,), L)
                a = amp.get(tuple(sorted(L + (i,))), 0)
                b = amp.get(tuple(sorted(L + (j,))), 0)
                s += sg * a.conjugate() * b
            tot += -2j * math.pi * sl * w / (2 * chi) * (s - s.conjugate())
        print("S", I, fmt(tot.real), fmt(tot.imag))
    x = (0.3, -0.2, 0.5, 1.1)
    F = {}
    A = {}
    for xb, xp, chi, w, amp in ms:
        th = 2 * math.pi * sum(sp.delta((t,)) * xp[t] * x[t] for t in range(4))
        ph = cmath.exp(1j * th)
        c = w / (2 * chi)
        xv = {(t,): xp[t] for t in range(4)}
        fw = sp.wedge(xv, amp)
        for K, v in fw.items():
            F[K] = F.get(K, 0) + c * 2 * (ph * 2j * math.pi * v).real
        for K, v in amp.items():
            A[K] = A.get(K, 0) + c * 2 * (ph * v).real
    print("A_at", " ".join(fmt(A.get((t,), 0.0)) for t in range(4)))
    print("F_at", " ".join(fmt(F.get(K, 0.0)) for K in sp.blades(2)))
    T = sp.stress(F)
    print("T_at", " ".join(fmt(T[i][j].real) for i in range(4) for j in range(4)))


if __name__ == "__main__":
    stress_cases()
    mode_cases()
