import xml.etree.ElementTree as ET

import numpy as np

from wblab.svg import Chart, nice_ticks

NS = "{http://www.w3.org/2000/svg}"


def test_nice_ticks_cover_range():
    t = nice_ticks(-0.37, 2.2)
    assert t[0] <= -0.37 and t[-1] >= 2.2
    steps = np.diff(t)
    np.testing.assert_allclose(steps, steps[0])
    assert len(nice_ticks(1.0, 1.0)) >= 2
    assert list(nice_ticks(np.nan, 1.0)) == [0.0]


def test_chart_is_well_formed_xml(tmp_path):
    x = np.linspace(0, 1, 11)
    chart = Chart("a < b & c", "x", "y", comment="config=abc -- note")
    chart.add("pts", x, x**2)
    chart.add("curve", x, np.sqrt(x), style="line")
    chart.add("bars", x, x, style="errorbar", lo=x - 0.1, hi=x + 0.1)
    root = ET.fromstring(chart.render())
    assert root.tag == NS + "svg"
    assert len(root.findall(NS + "polyline")) == 1
    assert len(root.findall(NS + "circle")) == 22
    texts = [t.text for t in root.iter(NS + "text")]
    assert "a < b & c" in texts and "pts" in texts
    p = chart.save(tmp_path / "sub" / "c.svg")
    assert "config=abc" in p.read_text()


def test_non_finite_points_are_skipped():
    chart = Chart("t", "x", "y").add("s", np.array([0.0, 1.0, 2.0]), np.array([1.0, np.nan, 2.0]))
    root = ET.fromstring(chart.render())
    assert len(root.findall(NS + "circle")) == 2


def test_empty_chart_renders():
    ET.fromstring(Chart("empty", "x", "y").render())
