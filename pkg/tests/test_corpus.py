from __future__ import annotations

import pytest

from eulermix.corpus import ENV_VAR, FAMILIES, family, is_regular, small_corpus, write_corpus
from eulermix.graph import validate


@pytest.mark.parametrize("name", FAMILIES)
def test_family_members_are_connected_eulerian(name):
    entries = family(name)
    assert entries and len({e.name for e in entries}) == len(entries)
    for e in entries:
        v = validate(e.graph)
        assert v.eulerian and v.connected, e.name


def test_regular_family_is_regular():
    assert all(is_regular(e) for e in family("regular"))
    assert not all(is_regular(e) for e in family("eulerian"))


def test_small_corpus():
    entries = small_corpus()
    assert all(e.n <= 12 for e in entries)
    assert {e.family for e in entries} == {"random_small", "structured_small"}
    gadget = next(e for e in entries if e.name.startswith("gadget"))
    assert gadget.holding is not None and gadget.chain().holding.max() > 0.5


def test_chain_holding_override():
    e = family("regular")[0]
    assert e.chain().holding.max() == 0.5
    assert e.chain(0.0).holding.max() == 0.0


def test_round_trip_through_directory(tmp_path, monkeypatch):
    paths = write_corpus(tmp_path)
    assert all(p.suffix == ".eul" for p in paths)
    monkeypatch.setenv(ENV_VAR, str(tmp_path))
    for name in FAMILIES:
        monkeypatch.delenv(ENV_VAR)
        built = {e.name: e for e in family(name)}
        monkeypatch.setenv(ENV_VAR, str(tmp_path))
        loaded = {e.name: e for e in family(name)}
        assert built.keys() == loaded.keys()
        for key, e in built.items():
            assert loaded[key].graph == e.graph
            assert (loaded[key].holding is None) == (e.holding is None)


def test_missing_family(tmp_path, monkeypatch):
    monkeypatch.setenv(ENV_VAR, str(tmp_path))
    with pytest.raises(FileNotFoundError):
        family("regular")
    with pytest.raises(KeyError):
        family("nonexistent")
