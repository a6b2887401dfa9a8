from __future__ import annotations

import json

import pytest

from tunearena.domain import (
    battle_from_dict,
    canonical_dumps,
    failed_battle_from_dict,
    failed_battle_to_dict,
    record_from_dict,
    record_to_dict,
)
from tunearena.domain.serialize import RecordParseError
from tunearena.domain.types import (
    FailedBattle,
    FailureInfo,
    Prompt,
    SessionInfo,
    UserIdentity,
)


def test_reference_round_trip_dataclass(reference_battle_dict):
    record = record_from_dict(reference_battle_dict)
    again = record_from_dict(record_to_dict(record))
    assert again == record


def test_reference_round_trip_tree(reference_battle_dict):
    """Parsed-then-reserialized JSON equals the original modulo key order."""
    record = record_from_dict(reference_battle_dict)
    ours = record_to_dict(record)
    assert canonical_dumps(ours, sort_keys=True) == canonical_dumps(
        reference_battle_dict, sort_keys=True
    )


def test_reference_float_literals_survive(reference_battle_text, reference_battle_dict):
    # Times serialize as numbers whose shortest repr matches the source text.
    record = record_from_dict(reference_battle_dict)
    dumped = canonical_dumps(record_to_dict(record))
    for literal in (
        "1753572708.6986423",
        "1753572791.0873723",
        "29.952",
        "192.496327",
        "1753572655.0246835",
    ):
        assert literal in reference_battle_text
        assert literal in dumped


def test_unknown_key_rejected(reference_battle_dict):
    bad = dict(reference_battle_dict)
    bad["surprise"] = 1
    with pytest.raises(RecordParseError, match="unknown keys"):
        record_from_dict(bad)


def test_missing_key_rejected(reference_battle_dict):
    bad = dict(reference_battle_dict)
    del bad["vote"]
    with pytest.raises(RecordParseError, match="missing keys"):
        record_from_dict(bad)


def test_unknown_preference_rejected(reference_battle_dict):
    bad = json.loads(canonical_dumps(reference_battle_dict))
    bad["vote"]["preference"] = "MAYBE"
    with pytest.raises(RecordParseError, match="preference"):
        record_from_dict(bad)


def test_unknown_listen_kind_rejected(reference_battle_dict):
    bad = json.loads(canonical_dumps(reference_battle_dict))
    bad["vote"]["a_listen_data"][0][0] = "SEEK"
    with pytest.raises(RecordParseError, match="SEEK"):
        record_from_dict(bad)


def test_enumerations_serialize_uppercase(reference_battle_dict):
    record = record_from_dict(reference_battle_dict)
    d = record_to_dict(record)
    assert d["vote"]["preference"] == "A"
    kinds = {item[0] for item in d["vote"]["a_listen_data"]}
    assert kinds <= {"PLAY", "PAUSE", "TICK"}


def test_receipt_extension_round_trips(reference_battle_dict):
    import dataclasses

    record = record_from_dict(reference_battle_dict)
    vote = dataclasses.replace(
        record.vote,
        a_listen_receipt_times=(1753572709.0, 1753572790.0),
        b_listen_receipt_times=(1753572762.0,),
    )
    extended = dataclasses.replace(record, vote=vote)
    d = record_to_dict(extended)
    assert d["vote"]["a_listen_receipt_times"] == [1753572709.0, 1753572790.0]
    assert record_from_dict(d) == extended
    # absent on records that never carried it
    assert "a_listen_receipt_times" not in record_to_dict(record)["vote"]


def test_failed_battle_round_trip():
    failed = FailedBattle(
        uuid="0a0a0a0a-1111-2222-3333-444444444444",
        gateway_git_hash="tunearena/0.1.0",
        prompt=Prompt(prompt="a calm piano piece"),
        prompt_user=UserIdentity(salted_ip="ab" * 16),
        prompt_session=SessionInfo(
            uuid="0b0b0b0b-1111-2222-3333-444444444444",
            create_time=1000.0,
            frontend_git_hash="cli/0.1.0",
            ack_tos="cd" * 16,
            new_battle_times=(1001.0,),
        ),
        failure=FailureInfo(phase="GENERATING", reason="endpoint timeout", sides=("A",)),
        timings=(("parse", 1001.5),),
    )
    d = failed_battle_to_dict(failed)
    assert failed_battle_from_dict(d) == failed
    # polymorphic dispatch keys off the failure marker
    assert battle_from_dict(d) == failed
