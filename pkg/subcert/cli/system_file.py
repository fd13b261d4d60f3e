"""
System Files
JSON definitions of systems of quadratic forms:

    {"n": 1,
     "forms": [{"name": "q",
                "terms": [{"mono": "xi1*xi1", "re": 1, "im": 0},
                          {"mono": "x1*x1", "re": 0, "im": 1}]}],
     "metadata": {...}}

Duplicate monomials add up. Every form must have a non-negative real part.
"""

import json
import logging
from typing import Any, Dict, List, Optional

from subcert.core.symplectic import PhaseSpace, QuadraticForm, SystemOfForms
from subcert.errors import InputError

logger = logging.getLogger(__name__)

_FORM_KEYS = {"name", "terms"}
_TERM_KEYS = {"mono", "re", "im"}


def _fail(message: str, path: str, kind: str = "syntax") -> InputError:
    return InputError(f"{path}: {message}" if path else message, kind=kind, path=path)


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _fail(f"expected a number, got {json.dumps(value)}", path)
    return float(value)


def _parse_terms(terms: Any, path: str) -> List[tuple]:
    if not isinstance(terms, list):
        raise _fail("'terms' must be a list", path)
    parsed = []
    for i, term in enumerate(terms):
        where = f"{path}.terms[{i}]"
        if not isinstance(term, dict):
            raise _fail("each term must be an object", where)
        unknown = set(term) - _TERM_KEYS
        if unknown:
            raise _fail(f"unknown keys {sorted(unknown)}", where)
        if not isinstance(term.get("mono"), str):
            raise _fail("'mono' must be a string", where)
        re = _number(term.get("re", 0), f"{where}.re")
        im = _number(term.get("im", 0), f"{where}.im")
        parsed.append((term["mono"], complex(re, im)))
    return parsed


def system_from_dict(data: Any, path: str = "") -> SystemOfForms:
    """Validated system from already decoded JSON."""
    if not isinstance(data, dict):
        raise _fail("the top level must be an object", path)
    n = data.get("n")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise _fail(f"'n' must be a positive integer, got {json.dumps(n)}", "n", kind="dimension")
    forms = data.get("forms")
    if not isinstance(forms, list) or not forms:
        raise _fail("'forms' must be a non-empty list", "forms")

    built: List[QuadraticForm] = []
    names: List[str] = []
    for i, entry in enumerate(forms):
        where = f"forms[{i}]"
        if not isinstance(entry, dict):
            raise _fail("each form must be an object", where)
        unknown = set(entry) - _FORM_KEYS
        if unknown:
            raise _fail(f"unknown keys {sorted(unknown)}", where)
        name = entry.get("name", f"q{i + 1}")
        if not isinstance(name, str):
            raise _fail("'name' must be a string", f"{where}.name")
        terms = _parse_terms(entry.get("terms"), where)
        try:
            q = QuadraticForm.from_monomials(n, terms, name=name, claimed_nonneg_real_part=True)
        except InputError as exc:
            exc.path = where
            exc.args = (f"{where}: {exc}",)
            raise
        built.append(q)
        names.append(name)

    metadata = data.get("metadata") or {}
    if not isinstance(metadata, dict):
        raise _fail("'metadata' must be an object", "metadata")
    return SystemOfForms(PhaseSpace(n), tuple(built), tuple(names), metadata)


def parse_system(text: str, path: str = "") -> SystemOfForms:
    """Parse UTF-8 JSON text; syntax errors carry line and column."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"Invalid JSON: {exc.msg}", kind="syntax", line=exc.lineno, column=exc.colno, path=path) from exc
    return system_from_dict(data, path)


def load_system(filename: str) -> SystemOfForms:
    try:
        with open(filename, "r", encoding="utf-8") as f:
            text = f.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"Cannot read {filename}: {exc}", kind="syntax", path=filename) from exc
    logger.debug("parsing %s", filename)
    return parse_system(text, filename)


def system_to_dict(sys: SystemOfForms) -> Dict[str, Any]:
    forms = []
    for name, q in zip(sys.names, sys.forms):
        terms = [
            {"mono": mono, "re": float(c.real), "im": float(c.imag)}
            for mono, c in q.to_monomials()
        ]
        forms.append({"name": name, "terms": terms})
    data: Dict[str, Any] = {"n": sys.n, "forms": forms}
    if sys.metadata:
        data["metadata"] = _jsonable(sys.metadata)
    return data


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return str(value)


def emit_system(sys: SystemOfForms, indent: Optional[int] = 2) -> str:
    """Canonical JSON text of a system, reparsable by parse_system."""
    return json.dumps(system_to_dict(sys), sort_keys=True, indent=indent) + "\n"
