from fractions import Fraction

from hypothesis import settings

from qtails.series import QSeries

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def qs(*coeffs, order=None):
    return QSeries([Fraction(c) for c in coeffs], order)
