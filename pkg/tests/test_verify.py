import json
import math

import numpy as np
import pytest

from localize import kernels as kn
from localize import verify as vf
from localize.special_fn import DomainError


def test_table1_entries():
    assert vf.TABLE1[7][2] == 297
    assert vf.TABLE1[9][9] == 1
    assert vf.TABLE1[3][4] == 0
    rep = vf.regen_table1()
    assert rep.passed and rep.detail["mismatches"] == 0


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_reference_q_check(m):
    assert vf.check_reference_q(m).passed


def test_reference_forms_only_to_m4():
    with pytest.raises(ValueError):
        vf.reference_q(3, 5)
    with pytest.raises(ValueError):
        vf.reference_center(3, 5)


def test_q_system_check():
    assert vf.check_q_system(4, 6).passed


@pytest.mark.parametrize("family, d, m, eps", [("main", 3, 2, 0.1), ("flat", 2, 3, 0.5),
                                               ("s1_second", 2, 4, 0.1)])
def test_equivalence_examples(family, d, m, eps):
    rep = vf.check_equivalence(family, d, m, eps, 512)
    assert rep.passed and rep.measured < 1e-10


@pytest.mark.parametrize("d", [2, 3, 5])
def test_main_m1_equals_poisson_multiple(d):
    # both evaluators reduce to (a^2 - 1) / (2 |x - a eta|^d) on the sphere
    eps = 0.2
    closed, expansion = vf._equivalence_values("main", d, 1, eps, 128)
    a = 1 + eps
    x = vf.sphere_sample(d, 128, eps)
    ref = (a * a - 1) / 2 * np.linalg.norm(x - a * kn.default_eta(d), axis=-1) ** (-d)
    np.testing.assert_allclose(closed, ref, rtol=1e-13)
    np.testing.assert_allclose(expansion, ref, rtol=1e-11)


def test_sample_points():
    x = vf.sphere_sample(4, 100, 0.05)
    assert x.shape == (100, 4)
    np.testing.assert_allclose(np.linalg.norm(x, axis=-1), 1.0, atol=1e-14)
    y = vf.disk_sample(2, 64, 0.5)
    assert y.shape == (64, 2) and np.all(np.linalg.norm(y, axis=-1) <= 0.5 + 1e-15)
    assert vf.disk_sample(1, 9, 1.0)[:, 0].tolist() == pytest.approx(np.linspace(-1, 1, 9).tolist())


def test_rho_grid_covers_both_ends():
    g = vf.rho_grid(0.1)
    assert g[0] == 0.0 and g[-1] == math.pi
    assert np.all(np.diff(g) > 0)


def test_localization_main_example():
    rep = vf.fit_localization_constant("main", 3, 2, 5, (0.2, 0.1, 0.05, 0.025))
    assert rep.passed and rep.measured <= 2


def test_localization_colzani_example():
    assert vf.fit_localization_constant("colzani", 2, 3, 4).passed


def test_localization_wrong_exponent_fails():
    # one power more than the true decay: the far tail makes c(eps) grow like 1/eps
    rep = vf.fit_localization_constant("main", 3, 2, 6)
    assert not rep.passed


def test_negative_control():
    rep = vf.check_single_derivative_blowup(3, 2)
    assert rep.passed
    assert all(1.4 < r < 2.1 for r in rep.measured)


def test_center_asymptotics():
    rep = vf.check_center_asymptotics(5, 3)
    assert rep.passed and rep.detail["exact_match"]
    assert vf.check_center_asymptotics(2, 1).measured == math.inf


@pytest.mark.parametrize("m, value", [(1, math.pi), (2, math.pi / 2), (3, 3 * math.pi / 8)])
def test_fourier_at_zero(m, value):
    assert vf.fourier_numeric(m, 0.5, 0.0) == pytest.approx(value, rel=1e-12)
    assert vf.fourier_closed(m, 0.5, 0.0) == pytest.approx(vf.fourier_numeric(m, 0.5, 0.0), rel=1e-12)


def test_fourier_decays():
    assert vf.fourier_closed(3, 0.5, 1e4) < 1e-100
    assert vf.check_fourier_lemma(3, 0.1).passed


def test_fd_check_and_precondition():
    rep = vf.check_fd_reduction(3, 1, 0.5)
    assert rep.passed
    assert rep.measured["order"] == pytest.approx(1.0, abs=0.05)
    with pytest.raises(DomainError):
        vf.check_fd_reduction(3, 2, 0.5, t_list=[0.3, 0.1, 0.05, 0.02])


@pytest.mark.parametrize("d", [2, 3, 4])
def test_pole_inversion_check(d):
    rep = vf.check_pole_inversion(d, seed=7)
    assert rep.passed and rep.detail["roundtrip"] <= 1e-13


def test_pole_inversion_given_config():
    cfg = kn.to_point_charges(kn.expansion_spec(kn.KernelParams(3, 2, 0.5)), 0.05)
    assert vf.check_pole_inversion(3, cfg).passed


@pytest.mark.parametrize("fam, d, m, eps", vf.NORMALIZATION_CASES[::7])
def test_normalization_sample(fam, d, m, eps):
    assert vf.check_normalization(fam, d, m, eps).passed


def test_normalization_reference_unknown():
    with pytest.raises(ValueError):
        vf.normalization_reference("main", 4, 2, 0.1)


def test_mean_value_and_harmonicity():
    assert vf.check_mean_value(4, 3, 0.1).passed
    rep = vf.check_harmonicity("main", 3, 2, 0.5)
    assert rep.passed and rep.measured == pytest.approx(2.0, abs=0.05)


def test_distance_comparability():
    rep = vf.check_distance_comparability()
    assert rep.passed and rep.params["grid"] == 10**4


def test_loglog_slope():
    x = np.array([1.0, 0.5, 0.25, 0.125])
    assert vf.loglog_slope(x, 3 * x**2) == pytest.approx(2.0)


def test_report_serialization():
    rep = vf.regen_table1()
    d = rep.to_dict(timings=False)
    assert set(d) == {"id", "params", "measured", "reference", "tol", "pass", "seconds"}
    assert d["seconds"] is None and d["pass"] is True
    assert rep.to_dict()["seconds"] >= 0
    assert rep.line().startswith("[PASS] table1")


def test_suite_filter_and_determinism(monkeypatch):
    monkeypatch.setenv("LOCALIZE_THREADS", "1")
    serial = vf.reports_to_json(vf.run_suite("inversion", seed=42))
    monkeypatch.setenv("LOCALIZE_THREADS", "4")
    parallel = vf.reports_to_json(vf.run_suite("inversion", seed=42))
    assert serial == parallel
    doc = json.loads(serial)
    assert [r["id"] for r in doc] == sorted(r["id"] for r in doc)
    assert all(r["id"].startswith("inversion") for r in doc)
    assert vf.run_suite("no-such-check") == []


def test_thread_count(monkeypatch):
    monkeypatch.setenv("LOCALIZE_THREADS", "3")
    assert vf.thread_count() == 3
    monkeypatch.delenv("LOCALIZE_THREADS")
    assert vf.thread_count() >= 1


def test_default_ids_unique():
    ids = [i for i, _ in vf.default_checks()]
    assert len(ids) == len(set(ids))
