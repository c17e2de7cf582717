"""JSON helpers: numbers are written as decimal strings so output is bit-stable."""

import hashlib
import json
import math

from mpmath import mp


def num(x) -> str:
    """Decimal string for a float or mpf (17 significant digits)."""
    if isinstance(x, mp.mpf):
        if mp.isinf(x) or mp.isnan(x):
            return str(float(x))
        f = float(x)
        if f == 0.0 and x != 0 or math.isinf(f):
            # outside the double range: keep mpmath's own rendering
            return mp.nstr(x, 17)
        x = f
    return f"{float(x):.17g}"


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def digest(doc) -> str:
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()
