"""
subcert CLI Module
System files, reports and the command-line front-end.
"""

from subcert.cli.system_file import (
    parse_system,
    load_system,
    emit_system,
    system_from_dict,
    system_to_dict,
)
from subcert.cli.report import Report, clean, render, render_text, write_output

__all__ = [
    "parse_system", "load_system", "emit_system", "system_from_dict", "system_to_dict",
    "Report", "clean", "render", "render_text", "write_output",
]
