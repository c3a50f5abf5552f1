import xml.etree.ElementTree as ET

import numpy as np

from gradperc.front import extract_front
from gradperc.lattice import Region
from gradperc.render import FRONT_STROKE, render_svg
from gradperc.sampling import Configuration, StripSpec


def test_uniform_configuration_has_no_front_overlay():
    region = Region(0, 5, 0, 5)
    c = Configuration(region=region, occupied=np.ones((6, 6), dtype=bool))
    svg = render_svg(c)
    root = ET.fromstring(svg)
    assert root.tag.endswith("svg")
    assert FRONT_STROKE not in svg


def test_flat_interface_renders_straight_front():
    spec = StripSpec(N=3, ell=5)
    occ = np.zeros((7, 6), dtype=bool)
    occ[:4, :] = True  # occupied iff y <= 0
    c = Configuration(region=spec.region, occupied=occ)
    f = extract_front(c)
    svg = render_svg(c, front=f, band_halfwidth=2.0)
    root = ET.fromstring(svg)
    lines = root.findall(".//{http://www.w3.org/2000/svg}line")
    # 2 band guides plus one segment per front edge
    assert len(lines) == 2 + f.length
    # the front polyline hugs the flat interface between rows 0 and 1
    ys = [float(ln.get("y1")) for ln in lines[2:]]
    assert max(ys) - min(ys) < 1.5 * 8.0  # within one cell of flat


def test_svg_size_scales_with_region():
    region = Region(0, 3, 0, 3)
    c = Configuration(region=region, occupied=np.zeros((4, 4), dtype=bool))
    svg = render_svg(c, scale=4.0)
    root = ET.fromstring(svg)
    assert float(root.get("width")) < 100
