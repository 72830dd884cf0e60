#!/usr/bin/env python3
"""Regenerates mojibake_fixture.json: Icelandic text run through the two
classic misdecodings (UTF-8 bytes read as Latin-1 and as Windows-1252)."""

import argparse
import codecs
import json
import sys

SENTENCES = [
    "Þetta er próf.",
    "Ég á heima á Íslandi.",
    "Guðrún Ósk Þórðardóttir og Ýmir Ægisson.",
    "Öll börnin fóru út að leika sér í snjónum.",
    "ÁÉÍÓÚÝÞÆÖÐ áéíóúýþæöð",
    "Hann sagði “já” og hún sagði ‘nei’ – svo fóru þau…",
    "Kjötsúpa — þjóðarréttur Íslendinga",
    "Æðarvarp við Breiðafjörð",
    "Ýsa, þorskur og ufsi",
    "Héðinsfjarðargöng",
    "plain ASCII stays as is",
]


def lenient(err):
    # bytes Windows-1252 leaves undefined decode to the C1 control of the same value
    return "".join(chr(b) for b in err.object[err.start:err.end]), err.end


codecs.register_error("c1", lenient)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("-o", "--output", default="-")
    args = ap.parse_args()
    cases = []
    for s in SENTENCES:
        raw = s.encode("utf-8")
        cases.append({
            "original": s,
            "latin1": raw.decode("latin-1"),
            "cp1252": raw.decode("cp1252", errors="c1"),
        })
    text = json.dumps({"cases": cases}, ensure_ascii=False, indent=1) + "\n"
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(text)


if __name__ == "__main__":
    main()
