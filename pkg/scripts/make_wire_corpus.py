#!/usr/bin/env python3
"""Regenerate golden/wire_corpus.json.

Every adapter implementation must encode each listed message to exactly
`frame_hex` and decode `frame_hex` back to `message`. The corpus is
frozen; regenerate only on a deliberate protocol revision.
"""

import json
from pathlib import Path

from polyrv import wire

MESSAGES = [
    wire.Hello(component_label="javaComponent", seq=1),
    wire.Hello(component_label="cComponent", protocol_version="1", seq=1),
    wire.Event(event_name="callMailingExecution", context_key="mailshot-1",
               params={"mailshotID": "mailshot-1", "javaSubsCount": "5"}, seq=2),
    wire.Event(event_name="startXMLProcessing", context_key="mailshot-7",
               params={"mailshotID": "mailshot-7", "c_mailCount": "250"}, seq=3),
    wire.Event(event_name="inCreateMail", context_key="u3",
               params={"custID": "u3"}, seq=4),
    wire.Event(event_name="pay", context_key="cüstömer-1",
               params={"card": "カード", "customer": "cüstömer-1"}, seq=5),
    wire.Event(event_name="noparams", context_key="k", params={}, seq=6),
    wire.Event(event_name="tricky", context_key='quote"back\\slash',
               params={"a": "line\nbreak\ttab", "b": ""}, seq=7),
    wire.CondReq(request_id=1, condition_name="isEmailBlacklisted",
                 context_key="u3", args={"custID": "u3"}, seq=2),
    wire.CondReq(request_id=41, condition_name="isRegistered",
                 context_key="c1", args={"card": "cardA"}, seq=9),
    wire.CondResp(request_id=1, result=True, seq=3),
    wire.CondResp(request_id=3, result=False, seq=4),
    wire.ActReq(request_id=7, action_name="fixCount", context_key="m1",
                args={"v": "250"}, seq=5),
    wire.ActAck(request_id=7, seq=6),
    wire.Verdict(context_key="u3", text="logEmailBlacklisted(custID=u3)",
                 severity="violation", seq=8),
    wire.Verdict(context_key="-", text="protocol mismatch",
                 severity="violation", seq=1),
    wire.Verdict(context_key="c1", text="event outside instance lifetime",
                 severity="info", seq=11),
    wire.Bye(seq=1),
    wire.Bye(seq=12),
]


def main() -> None:
    entries = []
    for msg in MESSAGES:
        frame = wire.encode(msg)
        payload = json.loads(frame[4:].decode("utf-8"))
        entries.append({"message": payload, "frame_hex": frame.hex()})
    out = Path(__file__).parent.parent / "golden" / "wire_corpus.json"
    out.parent.mkdir(exist_ok=True)
    out.write_text(json.dumps(entries, indent=2, ensure_ascii=False) + "\n",
                   encoding="utf-8")
    print(f"wrote {out} ({len(entries)} frames)")


if __name__ == "__main__":
    main()
