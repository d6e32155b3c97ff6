"""Smoke test for the Python extension module.

Build first:
    cargo build --release -p trivortex-py --features extension-module
then run:
    python3 python/smoke_test.py
"""

import importlib.util
import math
import os
import shutil
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def load():
    for profile in ("release", "debug"):
        lib = os.path.join(ROOT, "target", profile, "libtrivortex_py.so")
        if os.path.exists(lib):
            break
    else:
        sys.exit("extension not built; see the module docstring")
    tmp = tempfile.mkdtemp()
    target = os.path.join(tmp, "trivortex.so")
    shutil.copy(lib, target)
    spec = importlib.util.spec_from_file_location("trivortex", target)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def main():
    tv = load()
    deg = math.radians

    near_line = tv.SourceArrangement(3.0, 3.0, deg(175))
    assert len(tv.enumerate_lattice(near_line)) == 6
    preds = tv.predict_all(near_line, 25.0)
    assert len(preds) == 12
    for p in preds:
        r = math.hypot(25.0, p.r_perp)
        assert abs(near_line.farfield(p.r_perp, p.theta, 25.0)) < 1e-9 * 3 / r

    square = tv.SourceArrangement(3.0, 3.0, deg(90))
    e = tv.ellipse(square)
    assert e["class"] == "ellipse"
    assert abs(e["center"][0] + 1 / 3) < 1e-12 and abs(e["center"][1] + 2 / 3) < 1e-12
    assert abs(e["s_plus"] - 3.0) < 1e-12 and abs(e["s_minus"] - 3.0) < 1e-12
    assert abs(tv.estimate_count(square) - 18 * math.pi) < 1e-9

    assert tv.mn_scale(0, 0, 0.0, 0.0) == (2 * math.pi, 4 * math.pi)
    assert tv.winding_number([0.0, math.pi / 2, math.pi, 3 * math.pi / 2]) == 1
    assert abs(tv.fresnel_number(3.0, 1.0, 100.0) - 0.09) < 1e-15
    ratio = tv.rs_kernel([0.0, 0.0, 100 / (2 * math.pi)], (0.0, 0.0), 2 * math.pi) / tv.rs_kernel_far(
        [0.0, 0.0, 100 / (2 * math.pi)], (0.0, 0.0), 2 * math.pi
    )
    assert abs(abs(ratio - 1) - 0.01) < 1e-12

    sixty = tv.SourceArrangement(3.0, 3.0, deg(60))
    grid = tv.sample_grid(sixty, 25.0, resolution=256, model="farfield")
    assert grid.shape == (256, 256)
    dets = grid.detect()
    assert dets and all(abs(d.charge) == 1 for d in dets)
    half = 0.6 * 25.0
    visible = [p for p in tv.predict_all(sixty, 25.0) if abs(p.x) < half and abs(p.y) < half]
    report = tv.match_vortices(visible, dets, 0.5)
    assert not report["unmatched_predictions"], report
    assert len(report["pairs"]) == len(visible)

    try:
        tv.predict_all(tv.SourceArrangement(3.0, 3.0, 0.0), 25.0)
    except tv.VortexError as exc:
        assert "CollinearArrangement" in str(exc)
    else:
        raise AssertionError("collinear arrangement accepted")

    try:
        tv.sample_grid(sixty, 25.0, model="nonsense")
    except tv.VortexError:
        pass
    else:
        raise AssertionError("unknown model accepted")

    print(f"ok: {len(preds)} predictions, {len(dets)} detections, rms {report['rms_residual']:.4f}")


if __name__ == "__main__":
    main()
