"""Independent reference implementations used only by the tests."""
import mpmath as mp


def rho_series(v, terms=320, dps=110):
    """Dickman rho from power series about the right end of each unit interval.

    On [k, k+1], g_k(w) = rho(k+1-w) satisfies (k+1-w) g_k'(w) = g_{k-1}(w) and
    g_k(1) = g_{k-1}(0); each series has radius 2, so w <= 1 converges fast.
    """
    with mp.workdps(dps):
        v = mp.mpf(v)
        if v <= 1:
            return 1.0
        a = [1 - mp.log(2)] + [mp.mpf(1) / (i * 2 ** i) for i in range(1, terms)]
        k = 1
        while v > k + 1:
            k += 1
            c = [mp.mpf(0)]
            for i in range(terms - 1):
                c.append((a[i] + i * c[i]) / ((k + 1) * (i + 1)))
            c[0] = a[0] - sum(c)
            a = c
        w = k + 1 - v
        return float(sum(ci * w ** i for i, ci in enumerate(a)))
