import random

import pytest
from hypothesis import given, settings, strategies as st

from polyrv import wire
from polyrv.errors import DecodeError, EncodeError

_name = st.text(
    alphabet=st.characters(whitelist_categories=["Ll", "Lu", "Nd"], whitelist_characters="_"),
    min_size=1, max_size=12)
_value = st.text(max_size=20).filter(
    lambda s: all(not (0xD800 <= ord(c) <= 0xDFFF) for c in s))
_key = _value.filter(bool)
_params = st.dictionaries(_name, _value, max_size=4)
_seq = st.integers(min_value=0, max_value=2**31)
_req = st.integers(min_value=0, max_value=2**31)

messages = st.one_of(
    st.builds(wire.Hello, component_label=_key, protocol_version=st.just("1"), seq=_seq),
    st.builds(wire.Event, event_name=_name, context_key=_key, params=_params, seq=_seq),
    st.builds(wire.CondReq, request_id=_req, condition_name=_name, context_key=_key,
              args=_params, seq=_seq),
    st.builds(wire.CondResp, request_id=_req, result=st.booleans(), seq=_seq),
    st.builds(wire.ActReq, request_id=_req, action_name=_name, context_key=_key,
              args=_params, seq=_seq),
    st.builds(wire.ActAck, request_id=_req, seq=_seq),
    st.builds(wire.Verdict, context_key=_value, text=_value,
              severity=st.sampled_from(["info", "violation"]), seq=_seq),
    st.builds(wire.Bye, seq=_seq),
)


def test_bye_is_the_documented_frame():
    assert wire.encode(wire.Bye(seq=1)) == b'\x00\x00\x00\x16{"kind":"BYE","seq":1}'


def test_event_roundtrip_program4_names():
    msg = wire.Event(event_name="startXMLProcessing", context_key="mailshot-7",
                     params={"mailshotID": "mailshot-7", "c_mailCount": "250"}, seq=2)
    decoded, rest = wire.decode(wire.encode(msg))
    assert decoded == msg
    assert rest == b""


def test_cond_resp_roundtrip():
    msg = wire.CondResp(request_id=3, result=False, seq=9)
    decoded, _ = wire.decode(wire.encode(msg))
    assert decoded == msg


def test_two_concatenated_frames():
    first = wire.Hello(component_label="store", seq=1)
    second = wire.Event(event_name="pay", context_key="c1",
                        params={"customer": "c1", "card": "A"}, seq=2)
    buffer = wire.encode(first) + wire.encode(second)
    decoded1, rest = wire.decode(buffer)
    assert decoded1 == first
    decoded2, rest = wire.decode(rest)
    assert decoded2 == second
    assert rest == b""


def test_malformed_payload_raises():
    bad = len(b'{"x"garbage').to_bytes(4, "big") + b'{"x"garbage'
    with pytest.raises(DecodeError):
        wire.decode(bad)


@pytest.mark.parametrize("payload", [
    b'{"kind":"NOPE","seq":1}',
    b'{"kind":"BYE"}',                       # no seq
    b'{"kind":"BYE","seq":1,"x":2}',         # extra field
    b'{"kind":"BYE","seq":true}',            # wrong type
    b'{"kind":"EVENT","seq":1,"context_key":"","event_name":"e","params":{}}',
    b'{"kind":"EVENT","seq":1,"context_key":"k","event_name":"e","params":{"a":1}}',
    b'{"kind":"VERDICT","seq":1,"context_key":"k","severity":"fatal","text":"x"}',
    b'{"kind":"BYE","seq":1,"seq":2}',       # duplicate key
    b'\xff\xfe{}',                           # not UTF-8
    b'[1,2]',
])
def test_invalid_messages_raise(payload):
    framed = len(payload).to_bytes(4, "big") + payload
    with pytest.raises(DecodeError):
        wire.decode(framed)


def test_oversize_declared_length_raises():
    with pytest.raises(DecodeError):
        wire.decode((wire.MAX_FRAME_BYTES + 1).to_bytes(4, "big"))


def test_oversize_payload_encode_raises():
    with pytest.raises(EncodeError):
        wire.encode(wire.Verdict(context_key="k", text="x" * (wire.MAX_FRAME_BYTES),
                                 severity="info", seq=1))


def test_invalid_constructions_rejected():
    with pytest.raises(ValueError):
        wire.Event(event_name="e", context_key="", params={}, seq=1)
    with pytest.raises(ValueError):
        wire.Event(event_name="e", context_key="k", params={"a": 1}, seq=1)
    with pytest.raises(ValueError):
        wire.Verdict(context_key="k", text="t", severity="bad", seq=1)
    with pytest.raises(ValueError):
        wire.CondResp(request_id=1, result="yes", seq=1)


@given(messages)
@settings(max_examples=300, deadline=None)
def test_roundtrip_property(msg):
    decoded, rest = wire.decode(wire.encode(msg))
    assert decoded == msg
    assert rest == b""


@given(messages)
@settings(max_examples=200, deadline=None)
def test_prefix_safety(msg):
    frame = wire.encode(msg)
    for cut in range(len(frame)):
        result, rest = wire.decode(frame[:cut])
        assert result is None
        assert rest == frame[:cut]


@given(st.lists(messages, min_size=2, max_size=5), st.data())
@settings(max_examples=100, deadline=None)
def test_streaming_decoder_reassembles_chunks(msgs, data):
    stream = b"".join(wire.encode(m) for m in msgs)
    decoder = wire.FrameDecoder()
    out = []
    pos = 0
    while pos < len(stream):
        size = data.draw(st.integers(min_value=1, max_value=max(1, len(stream) - pos)))
        out.extend(decoder.feed(stream[pos:pos + size]))
        pos += size
    assert out == msgs
    assert decoder.pending_bytes == 0


@given(st.lists(messages, min_size=2, max_size=10, unique_by=lambda m: id(m)))
@settings(max_examples=100, deadline=None)
def test_injectivity(msgs):
    frames = {}
    for msg in msgs:
        frame = wire.encode(msg)
        if frame in frames:
            assert frames[frame] == msg
        else:
            frames[frame] = msg
    distinct = []
    for msg in msgs:
        if msg not in distinct:
            distinct.append(msg)
    assert len(frames) == len(distinct)


def test_decoder_fuzz_never_crashes():
    rng = random.Random(1234)
    decoder = wire.FrameDecoder()
    survived = 0
    for _ in range(2000):
        blob = rng.randbytes(rng.randrange(1, 64))
        try:
            decoder.feed(blob)
        except DecodeError:
            decoder = wire.FrameDecoder()
        survived += 1
    assert survived == 2000
