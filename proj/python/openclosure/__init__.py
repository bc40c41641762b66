"""Open closure types: parsing, inference, the two evaluators, non-interference."""

import json as _json

from ._occ import (
    Context,
    OccError,
    Term,
    Type,
    Typing,
    Value,
    eval_classic,
    eval_open,
    equivalent,
    gen_typed_term,
    infer,
    parse_term,
    parse_type,
    run,
    value_has_type,
)
from ._occ import check_noninterference as _check_noninterference

# args are (kind, message, subject)
OccError.kind = property(lambda self: self.args[0])
OccError.subject = property(lambda self: self.args[2])


def check_noninterference(context, term):
    """Exhaustive check over two constants per atom; returns the report as a dict."""
    return _json.loads(_check_noninterference(context, term, "json"))


def report_text(context, term, ascii=False):
    return _check_noninterference(context, term, "text", ascii)


__all__ = [
    "Context",
    "OccError",
    "Term",
    "Type",
    "Typing",
    "Value",
    "check_noninterference",
    "equivalent",
    "eval_classic",
    "eval_open",
    "gen_typed_term",
    "infer",
    "parse_term",
    "parse_type",
    "report_text",
    "run",
    "value_has_type",
]
