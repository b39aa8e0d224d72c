import json
import math
from fractions import Fraction

import numpy as np
import pytest

from ptquartic import output
from ptquartic.config import OUTPUT_ENV, ConfigError, RunConfig, load_config
from ptquartic.locus import LocusCurve


@pytest.mark.parametrize("x, s", [
    (0.1, "0.1"), (1.0, "1"), (-0.0, "0"), (1 / 3, "0.333333333333333"),
    (-25.791792378525106, "-25.7917923785251"), (1e-20, "1e-20"), (123456.0, "123456"),
    (math.inf, "inf"),
])
def test_fmt_float(x, s):
    assert output.fmt_float(x) == s


def test_fmt_float_round_trips_short_values():
    for x in (0.5, 2.25, -3.125, 1e-7, 6.02e23):
        assert float(output.fmt_float(x)) == x


def test_json_conversion():
    data = {"z": 1 / 3 + 2j, "f": Fraction(2, 3), "arr": np.array([1.0, 2.5]),
            "n": np.int64(3), "t": (1, 2)}
    out = json.loads(output.dumps(data))
    assert out == {"z": {"re": 0.333333333333333, "im": 2.0}, "f": "2/3",
                   "arr": [1.0, 2.5], "n": 3, "t": [1, 2]}


def test_dumps_is_deterministic():
    obj = {"b": [1 / 7, 2 / 7], "a": {"x": 1e-300}}
    assert output.dumps(obj) == output.dumps(json.loads(output.dumps(obj)))


def test_curve_csv_round_trip(tmp_path):
    c = LocusCurve(0.5, "2", [(-1.0, complex(-2.5, 0.0)), (-0.95, complex(-2.4123456789, 0.0))])
    path = output.write_curve_csv(c, tmp_path / "c.csv")
    text = path.read_text()
    assert text.splitlines()[0] == "# J=0.5 branch=2"
    assert text.splitlines()[1] == "-1,-2.5,0"
    header, rows = output.read_curve_csv(path)
    assert header == {"J": "0.5", "branch": "2"}
    assert rows == c.samples


def test_config_defaults_and_env(tmp_path):
    cfg = load_config(env={})
    assert cfg.workers == 1 and cfg.radius == "auto" and cfg.fixed_radius is None
    cfg = load_config(env={OUTPUT_ENV: str(tmp_path)})
    assert cfg.out == tmp_path


def test_config_file_overrides_env(tmp_path):
    f = tmp_path / "cfg.json"
    f.write_text(json.dumps({"output_dir": "x", "eigen_tol": 1e-10, "radius": 9}))
    cfg = load_config(f, env={OUTPUT_ENV: "y"})
    assert cfg.output_dir == "x" and cfg.eigen_tol == 1e-10 and cfg.fixed_radius == 9.0


@pytest.mark.parametrize("bad", [{"eigen_tol": 0}, {"workers": 0}, {"radius": -1},
                                 {"ratio_tol": "a"}, {"nope": 1}])
def test_config_validation(tmp_path, bad):
    f = tmp_path / "cfg.json"
    f.write_text(json.dumps(bad))
    with pytest.raises(ConfigError):
        load_config(f, env={})


def test_replace_ignores_none():
    cfg = RunConfig().replace(workers=None, eigen_tol=1e-8)
    assert cfg.workers == 1 and cfg.eigen_tol == 1e-8
