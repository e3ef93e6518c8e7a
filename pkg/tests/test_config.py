"""
Tests for settings, argument parsing, artifacts and stored reference values.
"""
import json
from fractions import Fraction

import pytest

from painlab.config import (
    LabSettings,
    RunConfig,
    SettingsStore,
    parse_complex,
    parse_mu,
    parse_rational,
)
from painlab.errors import ConfigError
from painlab.pipelines import ReferenceBook, digits_agreement, printed_digits
from painlab.precision import PrecisionContext
from painlab.storage import ArtifactWriter, read_csv, read_json


@pytest.fixture
def prec():
    return PrecisionContext(30)


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    monkeypatch.delenv("PAINLAB_DIGITS", raising=False)
    monkeypatch.delenv("PAINLAB_LOG_LEVEL", raising=False)


@pytest.mark.parametrize(
    "text, expected",
    [("15/7", Fraction(15, 7)), ("-0.5", Fraction(-1, 2)), ("4", Fraction(4)), (" 3/6 ", Fraction(1, 2))],
)
def test_parse_rational(text, expected):
    assert parse_rational(text) == expected


@pytest.mark.parametrize("text", ["abc", "1/0", ""])
def test_parse_rational_rejects(text):
    with pytest.raises(ConfigError):
        parse_rational(text, "nu")


def test_parse_mu_bounds():
    """mu must lie above -4."""
    assert parse_mu("-3.5") == Fraction(-7, 2)
    with pytest.raises(ConfigError):
        parse_mu("-4")
    with pytest.raises(ConfigError):
        parse_mu("-5")


def test_parse_complex_forms(prec):
    mp = prec.mp
    assert parse_complex("2i", prec) == mp.mpc(0, 2)
    assert parse_complex("1.5-2i", prec) == mp.mpc("1.5", -2)
    assert parse_complex("-3.2+1.1j", prec) == mp.mpc(mp.mpf("-3.2"), mp.mpf("1.1"))
    assert parse_complex("33", prec) == mp.mpc(33)
    assert parse_complex("i", prec) == mp.mpc(0, 1)
    assert parse_complex(Fraction(1, 2), prec) == mp.mpc("0.5")


def test_parse_complex_rejects_garbage(prec):
    with pytest.raises(ConfigError):
        parse_complex("abc", prec)


def test_lab_settings_defaults_and_validation():
    lab = LabSettings()
    assert lab.digits == 30
    assert lab.log_level == "WARNING"
    assert LabSettings(log_level="debug").log_level == "DEBUG"
    with pytest.raises(ConfigError):
        LabSettings(digits=5)
    with pytest.raises(ConfigError):
        LabSettings(taylor_terms=3)
    with pytest.raises(ConfigError):
        LabSettings(walk_steps=0)
    with pytest.raises(ConfigError):
        LabSettings(log_level="LOUD")


def test_lab_settings_from_dict_rejects_unknown_keys():
    with pytest.raises(ConfigError, match="unknown settings keys"):
        LabSettings.from_dict({"digits": 40, "model": "x"})
    assert LabSettings.from_dict({"digits": 40}).digits == 40


def test_settings_store_missing_default_uses_defaults(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    store = SettingsStore()
    assert store.settings == LabSettings()


def test_settings_store_explicit_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="does not exist"):
        SettingsStore(str(tmp_path / "nope.json"))


def test_settings_store_bad_json(tmp_path):
    path = tmp_path / "painlab.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError):
        SettingsStore(str(path))
    path.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ConfigError, match="JSON object"):
        SettingsStore(str(path))


def test_settings_store_file_and_env_overrides(tmp_path, monkeypatch):
    path = tmp_path / "painlab.json"
    path.write_text(json.dumps({"digits": 45, "taylor_terms": 60}), encoding="utf-8")
    assert SettingsStore(str(path)).settings.digits == 45

    monkeypatch.setenv("PAINLAB_DIGITS", "50")
    monkeypatch.setenv("PAINLAB_LOG_LEVEL", "info")
    lab = SettingsStore(str(path)).settings
    assert lab.digits == 50
    assert lab.taylor_terms == 60
    assert lab.log_level == "INFO"

    monkeypatch.setenv("PAINLAB_DIGITS", "many")
    with pytest.raises(ConfigError, match="PAINLAB_DIGITS"):
        SettingsStore(str(path))


def test_run_config_normalizes_mu():
    config = RunConfig(command="stokes", mu="30/14")
    assert config.mu == "15/7"
    assert config.mu_exact == Fraction(15, 7)
    assert RunConfig(command="borel-bound").mu_exact is None
    assert config.prec.working_digits == 50


def test_run_config_validation():
    with pytest.raises(ConfigError):
        RunConfig(command="eval", mu="1", digits=9)
    with pytest.raises(ConfigError):
        RunConfig(command="eval", mu="-6")
    with pytest.raises(ConfigError):
        RunConfig(command="eval", mu="1", output_format="xml")


def test_artifact_json_is_deterministic(tmp_path):
    path = tmp_path / "out" / "result.json"
    config = RunConfig(command="coeffs", mu="1", output_path=str(path))
    writer = ArtifactWriter(config)
    text = writer.write_json({"b": 1, "a": "x"})
    assert path.read_text(encoding="utf-8") == text
    assert text == writer.dumps({"a": "x", "b": 1})

    payload = read_json(str(path))
    assert set(payload) == {"painlab_version", "config", "result"}
    assert payload["config"]["mu"] == "1"
    assert list(payload["result"]) == ["a", "b"]


def test_artifact_json_without_path_returns_text():
    writer = ArtifactWriter(RunConfig(command="coeffs", mu="1"))
    assert json.loads(writer.write_json({"rows": []}))["result"] == {"rows": []}


def test_artifact_csv(tmp_path):
    writer = ArtifactWriter(RunConfig(command="coeffs", mu="1"))
    path = str(tmp_path / "table.csv")
    count = writer.write_csv(path, ["n", "k"], ([i, i * i] for i in range(3)))
    assert count == 3
    assert read_csv(path) == [["n", "k"], ["0", "0"], ["1", "1"], ["2", "4"]]


def test_reference_book_ships_cases(prec):
    book = ReferenceBook()
    assert set(book.cases) >= {"mu1", "mu157", "mu4"}
    assert book.text("mu157", "K_minus") == "0.07069725039+0.01439846034j"
    value = book.value("mu4", "pole_0", prec)
    assert abs(value - prec.mp.mpf("-1.182001651")) < 1e-12
    with pytest.raises(ConfigError):
        book.text("mu157", "pole_9")


def test_printed_digits():
    assert printed_digits("-2.7837507946") == 11
    assert printed_digits("0.07069725039+0.01439846034j") == 10
    assert printed_digits("-2.365+0.002j") == 4


def test_digits_agreement(prec):
    mp = prec.mp
    assert digits_agreement(mp.mpf("-2.7837507946"), "-2.7837507946", prec) == 11
    assert digits_agreement(mp.mpf("-2.78375"), "-2.7837507946", prec) == 6
    assert digits_agreement(mp.mpf(1), "-2.7837507946", prec) == 0
