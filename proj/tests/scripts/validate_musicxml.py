#!/usr/bin/env python3
"""Validates MusicXML files against the MusicXML 3.1 XSD in tests/data/schema.

Usage: validate_musicxml.py FILE_OR_DIR...   Exit status 0 when every file is valid.
The DOCTYPE is ignored (no network, no DTD loading); only the XSD decides.
"""
import sys
from pathlib import Path

from lxml import etree

SCHEMA = Path(__file__).resolve().parent.parent / "data" / "schema" / "musicxml.xsd"


def files(args):
    for a in args:
        p = Path(a)
        if p.is_dir():
            yield from sorted(p.glob("*.musicxml"))
        else:
            yield p


def main(argv):
    schema = etree.XMLSchema(etree.parse(str(SCHEMA)))
    parser = etree.XMLParser(load_dtd=False, no_network=True, resolve_entities=False)
    bad = 0
    count = 0
    for f in files(argv[1:]):
        count += 1
        doc = etree.parse(str(f), parser)
        if not schema.validate(doc):
            bad += 1
            for err in list(schema.error_log)[:5]:
                print(f"{f}:{err.line}: {err.message}")
    print(f"{count - bad}/{count} valid")
    return 1 if bad or count == 0 else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
