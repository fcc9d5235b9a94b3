"""Independent reference evaluators used by the tests.

These are deliberately written apart from the package code: straight
transcriptions using numpy and the linear power domain.
"""
import numpy as np


def hata_a(fc, hm):
    return 1.1 * (np.log10(fc) - 0.7) * hm - (1.56 * np.log10(fc) - 0.8)


def hata_loss(fc, hb, hm, d, lsh):
    return (69.55 + 26.16 * np.log10(fc) - 13.82 * np.log10(hb) - hata_a(fc, hm)
            + (44.9 - 6.55 * np.log10(hb)) * np.log10(d) + lsh)


def femto_loss(fc, n, d1):
    return 20 * np.log10(fc) + n * np.log10(d1) - 28


def rx_power_dbm(pt_dbm, loss):
    # linear form P_R = P_T * 10^(-L/10), back to dBm
    pt_mw = 10 ** (pt_dbm / 10)
    return 10 * np.log10(pt_mw * 10 ** (-loss / 10))


def snir_db(s, femto, macro, noise):
    return 10 * np.log10(s / (sum(femto) + sum(macro) + noise))


def capacity(bw, snir_db_value):
    return bw * np.log2(1 + 10 ** (snir_db_value / 10))


def case1_truth(gf, gm, gamma):
    # MS in macrocell
    if gf >= gamma:
        return "HandoverToFemto"
    if gf >= gm:
        return "HandoverToFemto"
    return "StayInMacro"


def case2_truth(gf, gm, k):
    # MS in femtocell
    if not gm > gf:
        return "HandoverToFemto"
    if k * gf >= gm:
        return "HandoverToFemto"
    return "HandoverToMacro"


def truncated_gaussian_centroid(center, sigma, n=200001):
    """Continuous centroid of a Gaussian restricted to [0, 1], by trapezoid rule."""
    x = np.linspace(0.0, 1.0, n)
    mu = np.exp(-((x - center) ** 2) / (2 * sigma**2))
    return np.trapezoid(x * mu, x) / np.trapezoid(mu, x)
