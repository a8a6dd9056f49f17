import pytest

from ra_ddp import fixtures
from ra_ddp.taskfile import TaskFileError, dump, parse


@pytest.mark.parametrize("name", fixtures.NAMES)
def test_round_trip(name):
    cfg = fixtures.config(name)
    text = dump(cfg)
    again = parse(text)
    assert dump(again) == text
    assert again.task == cfg.task and again.U == cfg.U and again.D == cfg.D


def _text(name="line5"):
    return fixtures.path(name).read_text()


def test_unknown_key_rejected():
    with pytest.raises(TaskFileError):
        parse(_text() + "\nbogus: 1\n")


def test_non_integer_rejected():
    text = dump(fixtures.config("line5")).replace("initial_N: 5", "initial_N: '5'")
    assert text != dump(fixtures.config("line5"))
    with pytest.raises(TaskFileError):
        parse(text)


def test_not_yaml_mapping():
    with pytest.raises(TaskFileError):
        parse("- 1\n- 2\n")
    with pytest.raises(TaskFileError):
        parse("arena: [unclosed\n")
