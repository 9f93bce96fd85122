import os

import numpy as np
import pint
import pytest

from ..packages import utils


class TestRandom:
    @pytest.fixture(autouse=True)
    def default_seed(self):
        utils.set_seed(None)

    @pytest.fixture
    def number_tests(self):
        return(100)

    def test_random_seed_in_range(self, number_tests):
        for _ in range(number_tests):
            utils.set_seed(None)
            assert 1 <= utils.get_seed() <= int(1e6)

    def test_seed_is_kept(self):
        utils.set_seed(42)
        assert utils.get_seed() == 42

    def test_seed_type(self):
        with pytest.raises(TypeError):
            utils.set_seed(1.5)

    def test_seed_positive(self):
        with pytest.raises(ValueError):
            utils.set_seed(0)

    def test_stream_reproducible(self):
        first = utils.get_rng("noise", 7).normal(size=5)
        second = utils.get_rng("noise", 7).normal(size=5)
        assert np.array_equal(first, second)

    def test_streams_independent(self):
        first = utils.get_rng("noise", 7).normal(size=5)
        second = utils.get_rng("init", 7).normal(size=5)
        assert not np.array_equal(first, second)

    def test_stream_follows_global_seed(self):
        utils.set_seed(3)
        first = utils.get_rng("noise").normal(size=5)
        assert np.array_equal(first, utils.get_rng("noise", 3).normal(size=5))


class TestDictionaryUtils:
    def test_change_keys_to_lowercase(self):
        mixed = {
            "a": 3,
            "B": {
                    "C": 4,
                    "d": {
                          "E": 1
                        }
                }
            }
        lower = {
            "a": 3,
            "b": {
                    "c": 4,
                    "d": {
                          "e": 1
                        }
                }
            }
        assert lower == utils.dict_to_lowercase(mixed)

    def test_merge_overrides_leaves(self):
        base = {"signal": {"yellow": 3, "total cycle": 60}, "seed": 1}
        merged = utils.merge_dicts(base, {"signal": {"yellow": 2}})
        assert merged == {"signal": {"yellow": 2, "total cycle": 60},
                          "seed": 1}
        assert base["signal"]["yellow"] == 3


class TestFiles:
    def test_yaml_keys_lowercase(self, tmp_path):
        path = tmp_path / "settings.yaml"
        path.write_text("Total Cycle:\n  Value: 60\n  Units: s\n")
        assert utils.import_yaml(str(path)) == \
            {"total cycle": {"value": 60, "units": "s"}}

    def test_yaml_empty_file(self, tmp_path):
        path = tmp_path / "empty.yaml"
        path.write_text("")
        assert utils.import_yaml(str(path)) == {}

    def test_yaml_parse_error(self, tmp_path):
        path = tmp_path / "broken.yaml"
        path.write_text("a: [1, 2\n")
        with pytest.raises(RuntimeError):
            utils.import_yaml(str(path))

    def test_yaml_not_mapping(self, tmp_path):
        path = tmp_path / "list.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(RuntimeError):
            utils.import_yaml(str(path))

    def test_json_parse_error(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{\"nodes\": ")
        with pytest.raises(RuntimeError):
            utils.import_json(str(path))

    def test_write_atomic(self, tmp_path):
        path = tmp_path / "out" / "file.txt"
        utils.write_atomic(str(path), "first")
        utils.write_atomic(str(path), "second")
        assert path.read_text() == "second"
        assert os.listdir(tmp_path / "out") == ["file.txt"]


class TestUnits:
    def test_pint_check_correct(self):
        assert utils.pint_check(pint.Quantity(10, "m/s"), "[length] / [time]")

    def test_pint_check_incorrect(self):
        with pytest.raises(TypeError):
            utils.pint_check(pint.Quantity(10, "m"), "[time]")

    def test_pint_check_not_quantity(self):
        with pytest.raises(TypeError):
            utils.pint_check(10, "[time]")

    def test_pint_check_no_errors(self):
        assert not utils.pint_check(10, "[time]", no_errors=True)

    def test_magnitude_from_settings_pair(self):
        value = {"value": 1, "units": "min"}
        assert utils.to_magnitude(value, "[time]", "s") == pytest.approx(60)

    def test_magnitude_from_quantity(self):
        value = pint.Quantity(36, "km/h")
        assert utils.to_magnitude(value, "[length] / [time]", "m/s") == \
            pytest.approx(10)

    def test_magnitude_bare_number(self):
        assert utils.to_magnitude(300, "[length]", "m") == 300.0

    def test_magnitude_wrong_dimension(self):
        with pytest.raises(TypeError):
            utils.to_magnitude({"value": 3, "units": "m"}, "[time]", "s")

    def test_magnitude_missing_units(self):
        with pytest.raises(ValueError):
            utils.to_magnitude({"value": 3}, "[time]", "s")

    def test_magnitude_rejects_bool(self):
        with pytest.raises(TypeError):
            utils.to_magnitude(True, "[time]", "s")
