import pytest
import yaml

from spoofeval.data.protocol import TrialRecord
from spoofeval.data.records import Key
from spoofeval.exceptions import ConfigurationError, SimulationError
from spoofeval.simulation.categories import (
    PaCategoryLabel,
    category_for_trial,
    enumerate_categories,
    load_category_table,
)


class TestPaCategoryLabel:
    def test_enumeration_covers_every_combination(self):
        labels = enumerate_categories()

        assert len(labels) == 243
        assert len({str(label) for label in labels}) == 243
        assert all(label.is_replay for label in labels)

    def test_parse(self):
        label = PaCategoryLabel.parse("abc", "BA")

        assert label.acoustic == "abc"
        assert label.replay == "BA"
        assert str(label) == "abc:BA"

    def test_bonafide_has_no_replay_pair(self):
        label = PaCategoryLabel.parse("ccc")

        assert not label.is_replay
        assert str(label) == "ccc"

    @pytest.mark.parametrize(
        "acoustic,replay", [("abd", None), ("ab", None), ("abc", "BD"), ("abc", "b")]
    )
    def test_invalid(self, acoustic, replay):
        with pytest.raises(SimulationError):
            PaCategoryLabel.parse(acoustic, replay)

    def test_half_replay_pair_rejected(self):
        with pytest.raises(SimulationError, match="invalid replay category"):
            PaCategoryLabel("a", "a", "a", attacker_to_talker="A")


class TestCategoryForTrial:
    def test_spoof_trial(self):
        trial = TrialRecord("PA_0079", "PA_T_0000001", "bca", "CB", Key.SPOOF)

        assert category_for_trial(trial) == PaCategoryLabel("b", "c", "a", "C", "B")

    def test_bonafide_trial(self):
        trial = TrialRecord("PA_0079", "PA_T_0000002", "aaa", "bonafide", Key.BONAFIDE)

        assert category_for_trial(trial) == PaCategoryLabel("a", "a", "a")

    def test_error_names_trial(self):
        trial = TrialRecord("PA_0079", "PA_T_0000003", "-", "AA", Key.SPOOF)

        with pytest.raises(SimulationError, match="trial 'PA_T_0000003'"):
            category_for_trial(trial)


class TestCategoryTable:
    def test_default_table(self, category_table):
        assert category_table.room_size["a"] == (2.0, 5.0)
        assert category_table.reverberation["c"] == (0.5, 0.75)
        assert category_table.device_quality["C"].drive == (3.0, 3.0)

    def test_yaml_override(self, tmp_path):
        path = tmp_path / "categories.yaml"
        path.write_text(yaml.safe_dump({"room_size": {"c": [10.0, 40.0]}}))

        table = load_category_table(path)

        assert table.room_size["c"] == (10.0, 40.0)
        assert table.room_size["a"] == (2.0, 5.0)

    def test_mapping_override_applied_last(self, tmp_path):
        path = tmp_path / "categories.yaml"
        path.write_text(yaml.safe_dump({"room_height": 2.8}))

        table = load_category_table(path, overrides={"room_height": [2.4, 2.6]})

        assert table.room_height == (2.4, 2.6)

    @pytest.mark.parametrize(
        "override,message",
        [
            ({"reverberation": {"a": [0.6, 0.7]}}, "must not decrease"),
            ({"colour": "red"}, "categories.colour"),
            ({"room_size": {"d": [1.0, 2.0]}}, "categories.room_size.d"),
            ({"aspect_ratio": [0.5, 1.0]}, "at least 1"),
            ({"talker_to_mic": {"a": [0.5, 0.1]}}, "invalid range"),
            ({"device_quality": {"B": {"high": 9000.0}}}, "passband must contain"),
            ({"device_quality": {"A": {"drive": 2.0}}}, "drive must not exceed"),
        ],
    )
    def test_invalid_overrides(self, override, message):
        with pytest.raises(ConfigurationError, match=message):
            load_category_table(overrides=override)

    def test_unreadable_file(self, tmp_path):
        with pytest.raises(ConfigurationError, match="cannot read category table"):
            load_category_table(tmp_path / "absent.yaml")
