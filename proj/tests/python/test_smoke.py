from fractions import Fraction

import numpy as np
import pytest

import kakeya_lab as kl


def test_figure_rows():
    assert kl.linear_exponent(5)["p"] == "18/13"
    assert kl.linear_exponent(5)["k"] == 3
    assert kl.hausdorff_bound(12) == "31/4"
    assert Fraction(kl.pwa_exponent(5)["p"]) == 1 + Fraction(5**2, 4**3)
    assert kl.pwa_exponent(11)["p"] == "7/6"


def test_ladder_and_weights():
    assert kl.p_ladder(5, 3)[-1] == "18/13"
    assert kl.final_conjugate(5, 3) == "18/5"
    g = [Fraction(x) for x in kl.gamma_weights(6, 2)]
    assert g[0] == Fraction(1, 3) and g[1] == Fraction(1, 12)
    assert sum(g) == 1
    assert kl.verify_xy_zero(5, 3)


def test_table_text():
    csv = kl.emit_table(1, 5, 8)
    assert csv.splitlines()[0].startswith("n,")
    assert "21/17" in csv


def test_family_and_raster():
    fam = kl.make_direction_separated_family(2, 1 / 16, 7)
    assert len(fam) >= 16
    assert fam.min_pairwise_angle() >= 1 / 16 - 1e-12
    values, lo, h = kl.rasterize(fam, 1 / 64)
    assert values.ndim == 2
    assert np.isclose(values.sum() * h * h, fam.total_volume(), rtol=0.15)
    assert kl.kakeya_ratio(fam, 2.0, 1 / 64) > 0


def test_preconditions_raise():
    with pytest.raises(ValueError):
        kl.make_direction_separated_family(2, 0.5, 1)


def test_poly_bound():
    r = kl.poly_average_bound([0.0, 1.0], -1.0, 1.0, 2.0)
    assert r["holds"] and abs(r["lhs"] - 2) < 1e-12 and abs(r["rhs"] - 4) < 1e-12


def test_experiment_round_trip(tmp_path):
    kl.set_workers(1)
    o = kl.poly_bound_fuzz(500, 6, 3)
    assert o["ok"]
    assert o["metrics"]["violations"] == 0
    paths = kl.write_artifacts(o, str(tmp_path))
    assert (tmp_path / "poly-bound.csv").read_bytes() == o["artifacts"]["poly-bound.csv"]
    assert len(paths) == len(o["artifacts"])
    kl.set_workers(4)
    assert kl.poly_bound_fuzz(500, 6, 3)["artifacts"] == o["artifacts"]
    kl.set_workers(1)


def test_system_small():
    o = kl.exponent_system(2, 8)
    assert o["ok"] and o["metrics"]["failures"] == 0
