import numpy as np
import pytest

from lambda_memory.figures import FIGURES, UnknownFigure, figure, get_figure
from lambda_memory.model import Topology

IDS = ["2a", "2b", "3a", "3b", "4b", "5a", "5b", "5c", "7a", "7b", "8a", "8b", "9a", "9b", "10a", "10b"]


def test_registry_complete():
    assert sorted(FIGURES) == sorted(IDS)


def test_unknown_figure():
    with pytest.raises(UnknownFigure):
        get_figure("11c")


def test_registered_parameters():
    f5 = get_figure("5a")
    assert (f5.base.gamma_eg, f5.base.gamma_es, f5.base.omega, f5.base.tau_p) == (0.9, 0.1, 0.7, 1.0)
    f4 = get_figure("4b")
    assert f4.base.b == 0.6 and f4.base.tau_p == 1.0
    f10 = get_figure("10a")
    assert [(c.params.b, c.params.a, c.params.omega) for c in f10.curves] == [
        (1.3, 0.7, 1.5), (0.6, 0.9, 0.7), (-0.4, 1.2, 0.4)]
    assert all(c.params.topology is Topology.SAGNAC for c in f10.curves)
    assert get_figure("3a").curves[0].params.topology is Topology.REGULAR


def test_fig3a_fock_above_coherent(tmp_path):
    res = figure("3a", points=6)
    assert np.all(res.curve("fock") > res.curve("coherent"))
    files = res.write(tmp_path)
    names = sorted(p.name for p in files)
    assert names == ["fig3a_coherent.csv", "fig3a_fock.csv", "manifest.txt"]
    manifest = (tmp_path / "manifest.txt").read_text().splitlines()
    assert manifest[0] == "figure=3a"
    assert any(line.startswith("curve=fock file=fig3a_fock.csv") for line in manifest)


def test_fig8b_enhanced_with_control():
    # an odd log grid on [0.2, 20] has its midpoint at tau_p = 2
    res = figure("8b", points=3)
    tau = res.tables["fock"].values[0]
    assert tau[1] == pytest.approx(2.0)
    fock = res.curve("fock")
    assert np.all(fock > res.curve("coherent"))
    regular = figure("3b", points=3).curve("fock")
    assert np.all(fock > regular)


def test_heatmap_writes_single_csv(tmp_path):
    res = figure("4b", points=3)
    assert res.tables["grid"].shape == (3, 3)
    names = sorted(p.name for p in res.write(tmp_path))
    assert names == ["fig4b.csv", "manifest.txt"]
