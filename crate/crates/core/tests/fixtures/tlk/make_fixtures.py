#!/usr/bin/env python3
"""Assemble canonical TLK V3.0 fixtures byte by byte.

Independent of the Rust reader/writer: header and entry records are packed
with `struct` straight from the format description. Run from this directory:

    python3 make_fixtures.py
"""
import struct

TEXT, SOUND, LENGTH = 0x1, 0x2, 0x4


def tlk(language_id, entries):
    """entries: list of (flags, resref bytes, volume, pitch, text bytes, sound_length)."""
    n = len(entries)
    strings_offset = 20 + 40 * n
    header = b"TLK " + b"V3.0" + struct.pack("<III", language_id, n, strings_offset)
    records = b""
    heap = b""
    for flags, resref, vol, pitch, text, length in entries:
        assert len(resref) <= 16
        records += struct.pack("<I", flags)
        records += resref.ljust(16, b"\0")
        records += struct.pack("<IIIIf", vol, pitch, len(heap), len(text), length)
        heap += text
    return header + records + heap


FIXTURES = {
    "empty.tlk": tlk(0, []),
    "one_entry.tlk": tlk(0, [(TEXT, b"", 0, 0, b"Hi", 0.0)]),
    "mixed.tlk": tlk(
        0,
        [
            (0, b"", 0, 0, b"", 0.0),
            (TEXT, b"", 0, 0, b"[Persuade] Come on, what harm is there in telling me?", 0.0),
            (TEXT | SOUND | LENGTH, b"n_greet01", 5, 7, b"Greetings, traveler.", 2.5),
            (TEXT, b"", 0, 0, b"", 0.0),
            (TEXT, b"", 0, 0, b"Caf\xe9 cr\xe8me for 500 gold.", 0.0),
        ],
    ),
    "german.tlk": tlk(
        2,
        [
            (TEXT, b"", 0, 0, b"Gr\xfc\xdfe!", 0.0),
            (TEXT, b"", 0, 0, b"Ihr werdet feststellen, dass ich jeder Sache sehr ergeben bin... wenn die Bezahlung stimmt.", 0.0),
        ],
    ),
}

if __name__ == "__main__":
    for name, data in FIXTURES.items():
        with open(name, "wb") as f:
            f.write(data)
        print(f"{name}: {len(data)} bytes")
