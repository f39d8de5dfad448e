"""Independent reference computations behind the golden values frozen in the
C++ tests. Uses exact rationals and brute force only; nothing here shares code
with the library. Run: python3 tests/oracle/oracle.py
"""
from fractions import Fraction as Fr
import math


def fit_alpha(h, n_ref=8):
    fb = n_ref - 1
    g = 1 << fb
    ts = ss = Fr(0)
    for x in range(g):
        for y in range(g):
            X, Y = Fr(x, g), Fr(y, g)
            S = Fr((x >> (fb - h)) + (y >> (fb - h)), 1 << h)
            T = X + Y + X * Y
            ts += T * S
            ss += S * S
    return ts / ss


def delta_ee(alpha):
    e = 0
    while Fr(2) ** e > alpha - 1:
        e -= 1
    return e


def round_half_away(q):
    a = abs(q)
    r = math.floor(a + Fr(1, 2))
    return r if q >= 0 else -r


def table(h, m, dee, n_ref=8):
    if m == 0:
        return []
    fb = n_ref - 1
    g = 1 << fb
    sel = int(math.log2(m))
    sums = [Fr(0)] * m
    cnt = [0] * m
    for x in range(g):
        for y in range(g):
            k = (x >> (fb - h)) + (y >> (fb - h))
            X, Y = Fr(x, g), Fr(y, g)
            S = Fr(k, 1 << h)
            D = (X + Y + X * Y) - (S + Fr(2) ** dee * S)
            i = k >> (h + 1 - sel)
            sums[i] += D
            cnt[i] += 1
    return [round_half_away(s / c * 256) if c else 0 for s, c in zip(sums, cnt)]


def scaletrim_rational(a, b, h, m, dee, lut, n=8):
    # Eq. (9) with exact rationals, floored once at the end.
    if a == 0 or b == 0:
        return 0
    na, nb = a.bit_length() - 1, b.bit_length() - 1
    X = Fr(a - (1 << na), 1 << na)
    Y = Fr(b - (1 << nb), 1 << nb)
    Xh = Fr(math.floor(X * (1 << h)), 1 << h)
    Yh = Fr(math.floor(Y * (1 << h)), 1 << h)
    S = Xh + Yh
    k = int(S * (1 << h))
    c = Fr(lut[k >> (h + 1 - int(math.log2(m)))], 256) if m else Fr(0)
    v = max(Fr(0), 1 + S + Fr(2) ** dee * S + c)
    return math.floor(v * 2 ** (na + nb))


def tosam(a, b, t, h):
    if a == 0 or b == 0:
        return 0
    na, nb = a.bit_length() - 1, b.bit_length() - 1
    X = Fr(a - (1 << na), 1 << na)
    Y = Fr(b - (1 << nb), 1 << nb)
    f = lambda v, w: Fr(math.floor(v * (1 << w)), 1 << w) + Fr(1, 1 << (w + 1))
    return math.floor((1 + f(X, h) + f(Y, h) + f(X, t) * f(Y, t)) * 2 ** (na + nb))


def drum(a, b, m):
    def cap(v):
        n = v.bit_length() - 1
        if n < m:
            return v, 0
        s = n - m + 1
        return (v >> s) | 1, s
    if a == 0 or b == 0:
        return 0
    (ca, sa), (cb, sb) = cap(a), cap(b)
    return (ca * cb) << (sa + sb)


def dsm(a, b, m, n=8):
    starts = list(range(0, n - m + 1, m))
    if starts[-1] != n - m:
        starts.append(n - m)
    def seg(v):
        lod = v.bit_length() - 1
        p = next(p for p in starts if lod < p + m)
        return (v >> p) & ((1 << m) - 1), p
    if a == 0 or b == 0:
        return 0
    (sa, pa), (sb, pb) = seg(a), seg(b)
    return (sa * sb) << (pa + pb)


def mared(f, n=8):
    res = []
    for a in range(1 << n):
        for b in range(1 << n):
            e = a * b
            if e:
                res.append((f(a, b) - e) / e)
    mean = sum(abs(r) for r in res) / len(res)
    var = sum((abs(r) - mean) ** 2 for r in res) / len(res)
    return 100 * mean, 100 * math.sqrt(var)


def fnv1a64(s):
    h = 0xcbf29ce484222325
    for c in s.encode():
        h ^= c
        h = (h * 0x100000001b3) & 0xFFFFFFFFFFFFFFFF
    return h


def grid_csv(f, n=8):
    rows = ["a,b,ared"]
    for a in range(1, 1 << n):
        for b in range(1, 1 << n):
            e = a * b
            rows.append("%d,%d,%.2f" % (a, b, abs(f(a, b) - e) / e * 100.0))
    return "\n".join(rows) + "\n"


# Cost model arithmetic, restated from the unit table.
U = dict(fa_area=1.0, fa_delay=1.0, mux2_area=0.5, mux2_delay=0.5, lod_area=0.75, lod_delay=0.5, lut_bit=0.25)


def clog2(v):
    return 0 if v <= 1 else math.ceil(math.log2(v))


def cost(h, m, dee, n=8):
    e = -dee
    f = max(h + e, 8)
    si, so = clog2(n), clog2(2 * n - 1)
    blocks = {
        "lod": (2 * n * U["lod_area"], si * U["lod_delay"]),
        "mantissa_shifters": (2 * h * si * U["mux2_area"], si * U["mux2_delay"]),
        "sum_adder": (h * U["fa_area"], h * U["fa_delay"]),
        "shift_add": ((h + 1 + e) * U["fa_area"], (h + 1 + e) * U["fa_delay"]),
        "mux_lut": (0.0, 0.0),
        "final_shifter": (2 * n * so * U["mux2_area"], so * U["mux2_delay"]),
    }
    if m:
        md = clog2(m) * U["mux2_delay"]
        blocks["mux_lut"] = ((m - 1) * 10 * U["mux2_area"] + m * 10 * U["lut_bit"] + (f + 2) * U["fa_area"],
                             max(0.0, md - blocks["shift_add"][1]) + (f + 2) * U["fa_delay"])
    area = sum(v[0] for v in blocks.values())
    delay = sum(v[1] for v in blocks.values())
    return blocks, area, delay, area * delay


def main():
    cfgs = {}
    for h in (3, 4, 5):
        al = fit_alpha(h)
        dee = delta_ee(al)
        print(f"alpha h={h}: {float(al):.15f}  delta_ee={dee}")
        for m in (0, 4, 8):
            cfgs[(h, m)] = (dee, table(h, m, dee))
            print(f"  table m={m}: {cfgs[(h, m)][1]}")

    dee, lut = cfgs[(3, 4)]
    print("hex (3,4):", ["0x%03X" % (c & 0x3FF) for c in lut])
    print("scaletrim(3,4) 200x200:", scaletrim_rational(200, 200, 3, 4, dee, lut))
    print("scaletrim(3,0) 200x200:", scaletrim_rational(200, 200, 3, 0, dee, []))

    print("drum(3) 200x200:", drum(200, 200, 3), " drum(4) 200x200:", drum(200, 200, 4))
    print("dsm(4) 200x200:", dsm(200, 200, 4), " dsm(3) 200x200:", dsm(200, 200, 3))
    print("tosam(1,3) 128x128:", tosam(128, 128, 1, 3), " 1x1:", tosam(1, 1, 1, 3),
          " 200x200:", tosam(200, 200, 1, 3), " 16x64:", tosam(16, 64, 1, 3))

    for (h, m) in ((3, 4), (3, 0), (4, 8)):
        d, l = cfgs[(h, m)]
        print(f"MARED/StdARED scaletrim({h},{m}):", mared(lambda a, b: scaletrim_rational(a, b, h, m, d, l)))
    print("MARED tosam(1,3):", mared(lambda a, b: tosam(a, b, 1, 3)))
    print("MARED tosam(1,4):", mared(lambda a, b: tosam(a, b, 1, 4)))

    d, l = cfgs[(3, 0)]
    csv = grid_csv(lambda a, b: scaletrim_rational(a, b, 3, 0, d, l))
    print("grid csv scaletrim(3,0) fnv1a64: %016x" % fnv1a64(csv))

    blocks, area, delay, energy = cost(4, 4, cfgs[(4, 4)][0])
    print("cost (4,4):", blocks, area, delay, energy)

    pts = []
    for h in (3, 4, 5):
        for m in (0, 4, 8):
            d, l = cfgs[(h, m)]
            mr = mared(lambda a, b: scaletrim_rational(a, b, h, m, d, l))[0]
            pts.append((f"scaletrim:{h},{m}", mr, cost(h, m, d)[3]))
    front = [p for p in pts
             if not any(q[1] <= p[1] and q[2] <= p[2] and (q[1] < p[1] or q[2] < p[2]) for q in pts)]
    front.sort(key=lambda p: (p[2], p[1]))
    print("pareto frontier:", [p[0] for p in front])
    for p in pts:
        print("  ", p)


if __name__ == "__main__":
    main()
