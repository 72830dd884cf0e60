#!/usr/bin/env python3
"""Writes utf8_fixture.json: random byte strings and their repair by Python's
bytes.decode('utf-8', errors='replace')."""
import json
import os
import random

rng = random.Random(1234)
pool = list(range(0x20, 0x7F)) + [0x80, 0x8F, 0x9F, 0xA0, 0xBF, 0xC0, 0xC1, 0xC2, 0xC3, 0xDF, 0xE0, 0xE1,
                                  0xED, 0xEE, 0xEF, 0xF0, 0xF1, 0xF4, 0xF5, 0xF8, 0xFE, 0xFF]
valid = ["þ", "ð", "é", "€", "漢", "😀", " ", "a"]

cases = []
for _ in range(800):
    parts = []
    for _ in range(rng.randint(0, 12)):
        if rng.random() < 0.5:
            parts.append(rng.choice(valid).encode())
        else:
            parts.append(bytes([rng.choice(pool)]))
    b = b"".join(parts).replace(b"\n", b" ")
    fixed = b.decode("utf-8", errors="replace")
    cases.append({"bytes": b.hex(), "repaired": fixed.encode().hex(), "replaced": fixed.count("�"),
                  "valid": "�" not in fixed})

with open(os.path.join(os.path.dirname(os.path.abspath(__file__)), "utf8_fixture.json"), "w") as f:
    json.dump({"cases": cases}, f, indent=0)
