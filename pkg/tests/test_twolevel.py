"""Driven two-level system: propagator, S-matrix, dipole-coupled pair.

Oracles: free evolution and constant drives have closed-form propagators;
resonant real envelopes obey the pulse-area formula S = exp(-i area sigma1);
the envelope 2i sech(2t) is the reflectionless unit-eigenvalue pulse with
a(zeta) = (zeta - i)/(zeta + i); the triple-exponential F matrix has the
exact derivative F'(0) = 2i (H(0,0) - H(x,y)).
"""

import dataclasses

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from scattergate.algebra import SIGMA1, entanglement_verdict, operator_schmidt
from scattergate.errors import NumericalError
from scattergate.twolevel import (
    DipoleParams,
    LorentzianPulse,
    LorentzianPulseSum,
    PulseSpec,
    RectangularPulse,
    TabulatedPulse,
    dipole_hamiltonian,
    dipole_params_from_json,
    envelope_from_json,
    f_matrix,
    propagate,
    pulse_from_json,
    rect_pulse_smatrix,
    scattering_matrix,
    scattering_scan,
)


def area_gate(theta):
    return np.cos(theta) * np.eye(2) - 1j * np.sin(theta) * SIGMA1


def soliton_pulse(width=5.5, dt=0.05):
    t = np.arange(-width, width + 1e-9, dt)
    return PulseSpec(envelope=TabulatedPulse(t=t, E=2j / np.cosh(2.0 * t)))


class TestEnvelopes:
    def test_lorentzian_shape_and_area(self):
        env = LorentzianPulse(a=1.5, b=0.2)
        assert env(0.0) == pytest.approx(2.0 * 0.2 / 1.5)
        t = np.linspace(*env.window, 400001)
        area = np.trapezoid(env(t).real, t)
        assert area == pytest.approx(2.0 * np.pi * 0.2, rel=1e-4)
        assert abs(env(env.window[1])) <= 1.01e-10

    def test_rectangular_and_tabulated_support(self):
        rect = RectangularPulse(x=0.3 - 0.1j, half_width=2.0)
        assert rect(1.9) == 0.3 - 0.1j
        assert rect(2.1) == 0.0
        t = np.linspace(-1.0, 1.0, 21)
        tab = TabulatedPulse(t=t, E=np.exp(1j * t))
        assert tab(0.35) == pytest.approx(np.exp(0.35j), abs=1e-4)
        assert tab(1.5) == 0.0

    def test_validation(self):
        with pytest.raises(ValueError, match="a > 0"):
            LorentzianPulse(a=-1.0, b=0.2)
        with pytest.raises(ValueError, match="positive"):
            RectangularPulse(x=1.0, half_width=0.0)
        with pytest.raises(ValueError, match="ascending"):
            TabulatedPulse(t=np.array([0.0, 2.0, 1.0, 3.0]), E=np.zeros(4))
        with pytest.raises(ValueError, match="positive"):
            LorentzianPulseSum(terms=((1.0, 0.1), (-2.0, 0.2)))

    def test_envelope_json_round_trips(self):
        envs = [
            LorentzianPulse(a=1.0, b=0.25),
            LorentzianPulseSum(terms=((1.0, 0.1), (2.0, 0.15))),
            RectangularPulse(x=0.5 + 0.25j, half_width=1.5),
            TabulatedPulse(t=np.linspace(0, 1, 5), E=np.arange(5.0) * (1 + 2j)),
        ]
        for env in envs:
            back = envelope_from_json(env.to_json())
            assert type(back) is type(env)
            tt = np.linspace(-0.5, 1.5, 7)
            np.testing.assert_allclose(back(tt), env(tt), atol=1e-12)


class TestPulseSpec:
    def test_auto_window_and_coupling(self):
        spec = PulseSpec(envelope=LorentzianPulse(a=1.0, b=0.25), detuning=0.8)
        assert spec.window == spec.envelope.window
        t = 1.3
        expect = spec.envelope(t) * np.exp(-1j * 0.8 * t)
        assert spec.coupling(t) == pytest.approx(expect, abs=1e-15)

    def test_window_must_cover_support(self):
        env = RectangularPulse(x=1.0, half_width=2.0)
        PulseSpec(envelope=env, window=(-3.0, 2.5))
        with pytest.raises(ValueError, match="outside"):
            PulseSpec(envelope=env, window=(-1.0, 2.0))

    def test_pulse_json_round_trip(self):
        spec = PulseSpec(envelope=LorentzianPulse(a=2.0, b=0.1), detuning=-0.3)
        back = pulse_from_json(spec.to_json())
        assert back.detuning == spec.detuning
        assert back.window == spec.window
        assert back.envelope.a == 2.0

    def test_accepts_recovered_pulse_document(self):
        doc = {
            "t": [0.0, 0.5, 1.0, 1.5],
            "re_E": [0.0, 0.1, 0.1, 0.0],
            "im_E": [0.0, 0.0, 0.1, 0.0],
        }
        spec = pulse_from_json(doc)
        assert isinstance(spec.envelope, TabulatedPulse)
        assert spec.detuning == 0.0
        assert pulse_from_json({"variant": "lorentzian", "a": 1.0, "b": 0.0}).detuning == 0.0
        with pytest.raises(ValueError, match="pulse"):
            pulse_from_json({"bogus": 1})


class TestPropagate:
    def test_free_evolution(self):
        spec = PulseSpec(envelope=LorentzianPulse(a=1.0, b=0.0))
        u = propagate(spec, 0.7, -3.0, 5.0)
        expect = np.diag([np.exp(-1j * 0.7 * 8.0), np.exp(1j * 0.7 * 8.0)])
        np.testing.assert_allclose(u, expect, atol=1e-12)

    def test_rectangular_interior(self):
        spec = PulseSpec(envelope=RectangularPulse(x=0.3, half_width=2.0))
        u = propagate(spec, 0.0, -1.0, 1.5)
        np.testing.assert_allclose(u, area_gate(0.3 * 2.5), atol=1e-10)

    def test_composition_and_inverse(self):
        rng = np.random.default_rng(7)
        t = np.linspace(-2.0, 2.0, 41)
        env = TabulatedPulse(
            t=t,
            E=(rng.normal(size=41) + 1j * rng.normal(size=41)) * np.exp(-t * t),
        )
        spec = PulseSpec(envelope=env, detuning=0.4)
        u10 = propagate(spec, 0.9, -2.5, 0.3)
        u21 = propagate(spec, 0.9, 0.3, 2.7)
        u20 = propagate(spec, 0.9, -2.5, 2.7)
        np.testing.assert_allclose(u21 @ u10, u20, atol=1e-9)
        np.testing.assert_allclose(
            propagate(spec, 0.9, 2.7, -2.5), u20.conj().T, atol=1e-9
        )
        assert np.linalg.det(u20) == pytest.approx(1.0, abs=1e-9)


class TestScatteringMatrix:
    def test_zero_envelope_identity(self):
        spec = PulseSpec(envelope=LorentzianPulse(a=1.0, b=0.0))
        np.testing.assert_allclose(scattering_matrix(spec, 0.3), np.eye(2), atol=1e-12)

    def test_resonant_lorentzian_quarter(self):
        # area 2 pi 0.25 -> S = -i sigma1
        spec = PulseSpec(envelope=LorentzianPulse(a=1.0, b=0.25))
        s = scattering_matrix(spec, 1.0)
        np.testing.assert_allclose(s, np.array([[0, -1j], [-1j, 0]]), atol=1e-6)
        assert np.linalg.norm(s.conj().T @ s - np.eye(2)) < 1e-9

    def test_area_formula_generic(self):
        spec = PulseSpec(envelope=LorentzianPulse(a=0.7, b=0.11))
        s = scattering_matrix(spec, 0.0)
        np.testing.assert_allclose(s, area_gate(2.0 * np.pi * 0.11), atol=1e-7)

    def test_equal_area_invariance(self):
        specs = [
            PulseSpec(envelope=LorentzianPulse(a=1.0, b=0.25)),
            PulseSpec(envelope=LorentzianPulse(a=2.5, b=0.25)),
            PulseSpec(envelope=RectangularPulse(x=np.pi / 8.0, half_width=2.0)),
        ]
        mats = [scattering_matrix(sp, 0.5) for sp in specs]
        for s in mats[1:]:
            np.testing.assert_allclose(s, mats[0], atol=1e-6)

    def test_resonant_sum_product(self):
        spec = PulseSpec(envelope=LorentzianPulseSum(terms=((1.0, 0.1), (2.0, 0.15))))
        s = scattering_matrix(spec, 0.0)
        np.testing.assert_allclose(s, area_gate(2.0 * np.pi * 0.25), atol=1e-6)
        parts = [
            scattering_matrix(PulseSpec(envelope=LorentzianPulse(a=a, b=b)), 0.0)
            for a, b in spec.envelope.terms
        ]
        np.testing.assert_allclose(parts[0] @ parts[1], s, atol=1e-6)

    def test_off_resonance_tail_consistency(self):
        # the Magnus tail correction must shrink with the cutoff
        spec = PulseSpec(envelope=LorentzianPulse(a=1.0, b=0.2), detuning=3.0)
        s5 = scattering_matrix(spec, 0.0, tail_cut=1e-5)
        s6 = scattering_matrix(spec, 0.0, tail_cut=1e-6)
        s7 = scattering_matrix(spec, 0.0, tail_cut=1e-7)
        d56 = np.max(np.abs(s5 - s6))
        d67 = np.max(np.abs(s6 - s7))
        assert d56 < 2e-5
        assert d67 < 0.4 * d56 + 1e-8

    def test_soliton_pulse_is_reflectionless(self):
        s = scattering_matrix(soliton_pulse(), 0.0)
        np.testing.assert_allclose(s, -np.eye(2), atol=5e-4)

    def test_soliton_transmission_scan(self):
        # a(zeta) = (zeta - i)/(zeta + i); the scan probes zeta = -detuning/2
        zetas = np.linspace(-3.0, 3.0, 13)
        mats = scattering_scan(soliton_pulse(), -2.0 * zetas)
        a = mats[:, 0, 0]
        expect = (zetas - 1j) / (zetas + 1j)
        np.testing.assert_allclose(a, expect, atol=2e-4)
        assert np.max(np.abs(mats[:, 1, 0])) < 2e-4
        fit = minimize_scalar(
            lambda eta: np.sum(
                np.abs(a - (zetas - 1j * eta) / (zetas + 1j * eta)) ** 2
            ),
            bounds=(0.3, 3.0),
            method="bounded",
        )
        assert abs(fit.x - 1.0) < 1e-3

    def test_scan_threads_match(self):
        spec = PulseSpec(envelope=RectangularPulse(x=0.4j, half_width=1.0))
        grid = np.array([-1.0, 0.0, 2.0])
        np.testing.assert_allclose(
            scattering_scan(spec, grid, threads=2),
            scattering_scan(spec, grid),
            atol=1e-12,
        )


def generic_params(**kw):
    base = dict(
        d_A=0.8 + 0.3j,
        d_B=1.1 - 0.2j,
        W_plus_A=1.0,
        W_minus_A=-0.3,
        W_plus_B=0.7,
        W_minus_B=-0.5,
        x=0.2 + 0.1j,
        y=0.6,
        T=1.0,
    )
    base.update(kw)
    return DipoleParams(**base)


class TestDipolePair:
    def test_bare_levels_diagonal(self):
        p = generic_params()
        h = dipole_hamiltonian(p, 0.0, 0.0)
        np.testing.assert_allclose(h, np.diag([1.7, 0.5, 0.4, -0.8]), atol=1e-14)

    def test_entries_against_tensor_form(self):
        p = generic_params()
        h = dipole_hamiltonian(p, p.x, p.y)
        assert np.linalg.norm(h - h.conj().T) < 1e-12
        assert h[0, 3] == pytest.approx(p.y * p.d_A * p.d_B, abs=1e-14)
        assert h[0, 1] == pytest.approx(p.x * p.d_B, abs=1e-14)
        assert h[0, 2] == pytest.approx(p.x * p.d_A, abs=1e-14)
        assert h[1, 2] == pytest.approx(p.y * p.d_A * np.conj(p.d_B), abs=1e-14)

    def test_uncoupled_evolution_is_product(self):
        p = generic_params(y=0.0)
        h = dipole_hamiltonian(p, p.x, 0.0)
        w, v = np.linalg.eigh(h)
        u = (v * np.exp(-1j * 1.3 * w)) @ v.conj().T
        s = operator_schmidt(u).coefficients
        assert s[1] <= 1e-9

    def test_f_matrix_trivial_and_unitary(self):
        p = generic_params(x=0.0, y=0.0)
        np.testing.assert_allclose(f_matrix(p), np.eye(4), atol=1e-12)
        f = f_matrix(generic_params())
        np.testing.assert_allclose(f.conj().T @ f, np.eye(4), atol=1e-12)

    def test_derivative_at_zero_duration(self):
        # second-order forward stencil; T > 0 is a type invariant so the
        # central form is not available
        p = generic_params()
        h = 1e-4
        f1 = f_matrix(dataclasses.replace(p, T=h))
        f2 = f_matrix(dataclasses.replace(p, T=2.0 * h))
        fd = (4.0 * f1 - f2 - 3.0 * np.eye(4)) / (2.0 * h)
        expect = 2j * (dipole_hamiltonian(p, 0.0, 0.0) - dipole_hamiltonian(p, p.x, p.y))
        assert np.max(np.abs(fd - expect)) < 1e-5

    def test_rect_drive_matches_f_matrix(self):
        p = generic_params()
        np.testing.assert_allclose(rect_pulse_smatrix(p), f_matrix(p), atol=1e-8)

    def test_entanglement_verdicts(self):
        assert entanglement_verdict(f_matrix(generic_params())) == "entangling"
        assert entanglement_verdict(f_matrix(generic_params(y=0.0))) == "product"

    def test_entanglement_is_stable_under_small_drive_changes(self):
        p = generic_params()
        s2 = operator_schmidt(f_matrix(p)).coefficients[1]
        rng = np.random.default_rng(3)
        for _ in range(4):
            dx, dy = rng.uniform(-1e-3, 1e-3, size=2)
            q = dataclasses.replace(p, x=p.x + dx, y=p.y + dy)
            s2p = operator_schmidt(f_matrix(q)).coefficients[1]
            assert abs(s2p - s2) <= 1e-2
            assert s2p > 1e-3

    def test_params_validation_and_json(self):
        with pytest.raises(ValueError, match="positive"):
            generic_params(T=0.0)
        p = generic_params()
        back = dipole_params_from_json(p.to_json())
        assert back == p
