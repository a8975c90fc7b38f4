import pytest

from lozenge_lab.dimers.double_dimer import superimpose
from lozenge_lab.dimers.sampler import cftp
from lozenge_lab.errors import LabError
from lozenge_lab.lab.render import render_svg
from lozenge_lab.trees.ust import wilson_ust


def test_tiling_svg(hexagon_222, rng, tmp_path):
    m = cftp(hexagon_222, rng)
    first = render_svg(m, tmp_path / "a.svg").read_text()
    second = render_svg(m, tmp_path / "nested" / "b.svg").read_text()
    assert first == second
    assert first.startswith("<svg")
    assert first.count("<polygon") == 12


def test_double_dimer_svg(hexagon_222, rng, tmp_path):
    d = superimpose(cftp(hexagon_222, rng), cftp(hexagon_222.translate(1, 0), rng))
    text = render_svg(d, tmp_path / "dd.svg").read_text()
    assert text.count("<polyline") >= len(d.paths) + len(d.doubled)
    assert text.count("<polygon") == len(d.domain.triangles) + len(d.loops)


def test_tree_svg(patch_2x2, rng, tmp_path):
    t = wilson_ust(patch_2x2, rng=rng)
    text = render_svg(t, tmp_path / "tree.svg").read_text()
    assert text.count("<circle") == len(patch_2x2.boundary)
    assert text.count("<polyline") == len(t.edges()) == 4


def test_unknown_object(tmp_path):
    with pytest.raises(LabError):
        render_svg("not a tiling", tmp_path / "x.svg")
    assert not (tmp_path / "x.svg").exists()
