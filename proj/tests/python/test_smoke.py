import math

import pytest

import resodecay as rd


def test_canonical_s_matrix_values():
    model = rd.SMatrixModel.canonical_unitary(2.0, 0.2)
    # S at the mirror point of the pole and on the axis.
    assert model.s(complex(2.0, -0.2)) == pytest.approx(3.0, rel=1e-12)
    assert abs(model.s(complex(2.0, 0.1))) == pytest.approx(0.0, abs=1e-14)
    for e in (1.0, 2.0, 2.7):
        assert abs(model.s(complex(e, 0.0))) == pytest.approx(1.0, rel=1e-12)
    assert model.pole_residue() == pytest.approx(complex(0.0, -0.2), rel=1e-12)


def test_laurent_coefficients():
    model = rd.SMatrixModel.canonical_unitary(2.0, 0.2)
    lc = rd.laurent_coefficients(model, radius=0.1)
    assert lc["R_minus_1"] == pytest.approx(complex(0.0, -0.2), abs=1e-10)
    assert lc["R_0"] == pytest.approx(complex(1.0, 0.0), abs=1e-10)
    assert lc["R_plus_1"] == pytest.approx(complex(0.0, 0.0), abs=1e-10)


def test_gamow_pairing_and_evolution():
    psi = rd.RationalHardyFunction([(1j, 2, 1.0 + 0j)], "H2-")
    assert psi.decay_order() == 2
    ket = rd.GamowKet.from_pole(2.0 - 0.1j)
    pairing = rd.gamow_pairing(psi, ket)
    assert pairing["discrepancy"] < 1e-8
    assert rd.eigenvalue_residual(psi, ket) < 1e-8

    closed = rd.evolved_pairing(psi, ket, 5.0, route="closed")
    quad = rd.evolved_pairing(psi, ket, 5.0, route="quadrature")
    assert abs(closed - quad) < 1e-8 * abs(closed)
    with pytest.raises(Exception):
        rd.evolved_pairing(psi, ket, -1.0)


def test_hardy_membership():
    psi = rd.RationalHardyFunction([(1j, 2, 1.0 + 0j)], "H2-")
    assert rd.hardy_membership_check(psi, "H2-")["pass"]
    assert not rd.hardy_membership_check(psi, "H2+")["pass"]


def test_survival_full_line_is_exponential():
    rho = rd.normalize_density("full", er=2.0, gamma=0.2)
    for t in (0.0, 1.0, 5.0):
        p = rd.survival_probability(rho, t)
        assert p["probability"] == pytest.approx(math.exp(-0.2 * t), rel=1e-7)
    assert rd.mean_lifetime(rho) == pytest.approx(5.0, rel=1e-6)


def test_sample_and_fit_round_trip():
    model = rd.SMatrixModel.canonical_unitary(2.0, 0.2)
    energies = rd.sample_lineshape(20000, model, 1.0, 3.0, seed=17)
    assert len(energies) == 20000
    edges = [1.4 + 1.2 * i / 16 for i in range(17)]
    fit = rd.fit_lineshape_events(energies, model, 1.0, 3.0, edges, background_order=-1)
    assert fit["quality"]["converged"]
    assert fit["gamma"] == pytest.approx(0.2, abs=4 * fit["se_gamma"])

    events = rd.sample_decays(20000, ["a", "b"], [0.05, 0.15], seed=18)
    times = [t for t, _ in events]
    labels = [c for _, c in events]
    tedges = [15.0 * i / 12 for i in range(13)]
    dfit = rd.fit_decay_events(times, labels, tedges, mode="joint")
    assert dfit["quality"]["converged"]
    assert dfit["tau"] == pytest.approx(5.0, abs=4 * dfit["se_tau"])

    ratio = rd.width_lifetime_product(
        dfit["tau"], dfit["se_tau"], fit["gamma"], fit["se_gamma"], 1.0
    )
    assert abs(ratio["pull"]) < 4.0
    assert ratio["consistent"]
