import pytest
from hypothesis import given
from hypothesis import strategies as st

from hcmdesign.drive import (
    BPB_HI,
    BPB_LO,
    ServoSpec,
    SpeedBand,
    design_factor,
    design_frequency,
    estimate_speed,
    evaluate_design,
    servo_frequency_cap,
)
from hcmdesign.errors import DegenerateShapeError, ValidationError
from hcmdesign.model import Explicit, resolve_mode_shape

positive = st.floats(1e-3, 1e4)


class TestServoFrequencyCap:
    def test_computed(self):
        s = ServoSpec("x", 3234, 15.4, 66, 25, 13.6)
        assert servo_frequency_cap(s, 7.0) == pytest.approx(385 / 28, rel=1e-15)
        assert servo_frequency_cap(s, 7.0) == pytest.approx(13.75)

    def test_halves_with_double_stroke(self):
        s = ServoSpec("x", 3234, 15.4, 66, 25, 13.6)
        assert servo_frequency_cap(s, 14.0) == servo_frequency_cap(s, 7.0) / 2

    def test_reference_mode(self, catalog):
        assert servo_frequency_cap(catalog.servo("A66BHLW"), 7.0, mode="reference") == 13.6

    def test_degenerate(self):
        s = ServoSpec("x", 1, 1, 1, 1, 1)
        with pytest.raises(DegenerateShapeError):
            servo_frequency_cap(s, 0.0)

    def test_bad_mode(self):
        with pytest.raises(ValidationError):
            servo_frequency_cap(ServoSpec("x", 1, 1, 1, 1, 1), 1.0, mode="magic")

    def test_servo_invariants(self):
        with pytest.raises(ValidationError) as exc:
            ServoSpec("Z", 1, 1, 0, 1, 1)
        assert exc.value.field == "servos.Z.weight"


class TestDesignFactor:
    def test_coral(self):
        assert design_factor(245, 188.7) == pytest.approx(1.30, abs=0.01)

    def test_carbonfish(self):
        alpha = design_factor(3234, 1177)
        assert alpha == pytest.approx(2.75, abs=0.01)
        assert round(alpha, 2) == 2.75

    def test_unity(self):
        assert design_factor(12.5, 12.5) == 1.0

    @given(positive, positive, st.floats(1e-3, 1e3))
    def test_scale_invariant(self, T_s, T_a, k):
        assert design_factor(k * T_s, k * T_a) == pytest.approx(design_factor(T_s, T_a), rel=1e-14)


class TestDesignFrequency:
    @pytest.mark.parametrize(
        "f_hcm, f_servo, expected",
        [(14.8, 4.5, (4.5, "servo")), (21.0, 13.6, (13.6, "servo")), (7.4, 13.6, (7.4, "hcm")), (5.0, 5.0, (5.0, "servo"))],
    )
    def test_cases(self, f_hcm, f_servo, expected):
        assert design_frequency(f_hcm, f_servo) == expected

    @given(positive, positive)
    def test_min_and_tag(self, a, b):
        f, tag = design_frequency(a, b)
        assert f == min(a, b)
        assert (tag == "servo") == (b <= a)


class TestEstimateSpeed:
    def test_ten_hertz(self):
        band = estimate_speed(10)
        assert (band.lo, band.hi) == (6.8, 10.8)
        assert (band.bpb_lo, band.bpb_hi) == (0.34, 0.54)

    def test_zero(self):
        assert estimate_speed(0).as_list() == [0.0, 0.0]

    def test_one(self):
        assert estimate_speed(1).as_list() == [0.68, 1.08]

    def test_custom_band(self):
        band = estimate_speed(4, SpeedBand(0, 0, bpb_lo=0.1, bpb_hi=0.2))
        assert band.as_list() == [0.8, 1.6]

    def test_defaults(self):
        assert (BPB_LO, BPB_HI) == (0.34, 0.54)

    @given(st.floats(0, 100), st.floats(0.01, 10))
    def test_homogeneous(self, f, k):
        a = estimate_speed(k * f)
        b = estimate_speed(f)
        assert a.lo == pytest.approx(k * b.lo, rel=1e-12, abs=1e-300)
        assert a.hi == pytest.approx(k * b.hi, rel=1e-12, abs=1e-300)

    def test_negative(self):
        with pytest.raises(ValidationError):
            estimate_speed(-1)


class TestEvaluateDesign:
    def test_carbonfish_reference(self, carbonfish):
        e = evaluate_design(*carbonfish, servo_cap="reference")
        assert e.f_design == 13.6
        assert e.limiting == "servo"
        assert e.f_m_hcm > 13.6
        assert estimate_speed(10).as_list() == [6.8, 10.8]

    def test_coral(self, coral):
        e = evaluate_design(*coral)
        assert e.f_m_hcm == pytest.approx(14.8, rel=0.05)
        assert e.f_design == 4.5
        assert e.limiting == "servo"

    def test_degenerate_shape(self, carbonfish):
        with pytest.raises(DegenerateShapeError):
            evaluate_design(*carbonfish, closure=Explicit(0.0))

    def test_infeasible_flagged_not_raised(self, carbonfish):
        e = evaluate_design(*carbonfish, alpha_min=1e6)
        assert not e.feasible
        assert e.alpha_min == 1e6

    def test_record_invariants(self, catalog):
        for preset in catalog.presets.values():
            for cap in ("reference", "computed"):
                e = evaluate_design(preset.geometry, catalog.material(preset.material), catalog.servo(preset.servo), servo_cap=cap)
                assert e.f_design <= e.f_m_hcm and e.f_design <= e.f_m_servo
                assert (e.limiting == "servo") == (e.f_m_servo <= e.f_m_hcm)
                assert e.alpha == e.T_servo / e.T_act
                assert e.U_barr == 3 * e.P_cr * e.D
                assert e.f_m_hcm * 2 * e.t_star == pytest.approx(1.0, rel=1e-15)
                assert e.T_act_literal == e.T_act
                assert e.L1 + e.L2 == e.l
                assert e.geometry == preset.geometry
                assert e.derived.T_act == e.T_act
                assert e.speed_band.as_list() == estimate_speed(e.f_design).as_list()

    def test_computed_cap_uses_horn_speed(self, carbonfish):
        g, mat, s = carbonfish
        e = evaluate_design(g, mat, s, servo_cap="computed")
        assert e.f_m_servo == s.speed * s.L_horn / (4 * e.u_L1)

    def test_shape_override(self, carbonfish):
        g, mat, s = carbonfish
        shape = resolve_mode_shape(g)
        assert evaluate_design(g, mat, s, shape=shape) == evaluate_design(g, mat, s)

    def test_moving_mass(self, carbonfish):
        g, mat, s = carbonfish
        e = evaluate_design(g, mat, s)
        assert e.moving_mass == pytest.approx(0.5 * 10 * 274 * 1.6e-9 * 1e6 + 66)
