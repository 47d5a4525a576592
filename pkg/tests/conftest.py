from fractions import Fraction

import pytest

from qfrob.madic import MAdicContext

PAIRS = [(5, Fraction(1, 2)), (7, Fraction(1, 3)), (7, Fraction(2, 3))]


@pytest.fixture
def ctx5():
    return MAdicContext.for_alpha(5, Fraction(1, 2))


@pytest.fixture(params=PAIRS, ids=lambda pa: f"p{pa[0]}_a{pa[1].numerator}_{pa[1].denominator}")
def ctx_pair(request):
    p, alpha = request.param
    return MAdicContext.for_alpha(p, alpha)
