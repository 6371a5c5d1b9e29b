"""Accepts binary numbers: bits, optionally followed by a point and bits."""

import re
import sys

NUMBER = re.compile(r"\s*[01]+(\.[01]+)?\s*")


def main(argv):
    if len(argv) != 2:
        print("usage: bnl_accept.py INPUT", file=sys.stderr)
        return 2
    try:
        with open(argv[1], encoding="utf-8") as f:
            text = f.read()
    except (OSError, UnicodeDecodeError) as e:
        print(e, file=sys.stderr)
        return 2
    if NUMBER.fullmatch(text):
        return 0
    print("not a binary number", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main(sys.argv))
