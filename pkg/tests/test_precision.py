import math

import mpmath
import pytest
from mpmath import mpf, workprec

from hypheat import precision
from hypheat.precision import PrecisionEscalationError, PrecisionPolicy, auto, fixed


def test_float_roundtrip_lossless():
    # converting to 64-bit and back at P >= 64 is lossless for representable values
    with workprec(80):
        for x in (0.1, 1.0 / 3.0, 2.5, 1e-300, 9.87654321e12):
            assert float(mpf(x)) == x
            assert mpf(float(mpf(x))) == mpf(x)


def test_arithmetic_accuracy_at_stated_bits():
    # results at P bits agree with higher-precision references to ~2^-P
    with workprec(64):
        third = mpf(1) / 3
        e1 = mpmath.exp(mpf(1))
    with workprec(192):
        assert abs(third - mpf(1) / 3) < mpf(2) ** -62
        assert abs(e1 - mpmath.exp(mpf(1))) / mpmath.e < mpf(2) ** -62


def test_auto_digit_formula():
    pol = auto(1e-8)
    for tau in (0.1, 0.5, 1.0, 4.0):
        want = 16 + math.ceil(math.pi ** 2 / (2 * tau * math.log(10))) + 8
        assert pol.oscillatory_digits(tau) == want


def test_fixed_mode_escalation_error():
    pol = fixed(64, 1e-10)
    assert pol.working_bits() == 64
    with pytest.raises(PrecisionEscalationError) as exc:
        pol.require_bits(256, "test task")
    assert exc.value.required_bits == 256
    # auto mode grants whatever is needed
    assert auto().require_bits(256, "test task") == 256


def test_policy_validation():
    with pytest.raises(ValueError):
        PrecisionPolicy(mode="loose")
    with pytest.raises(ValueError):
        PrecisionPolicy(mode="fixed")
    with pytest.raises(ValueError):
        PrecisionPolicy(target_rel_tol=0.0)


def test_to_mpf_exact():
    assert precision.to_mpf(0.5) == mpf(1) / 2
    x = mpf("1.25")
    assert precision.to_mpf(x) is x
