# -*- coding=utf-8 -*-
import os
import re

from typing import Optional

import colorama

from .misc import to_text

__all__ = ["colorize", "strip_ansi", "verdict", "status_line"]


ANSI_REMOVAL_RE = re.compile(r"\033\[((?:\d|;)*)([a-zA-Z])")


def _colors_disabled():
    return bool(
        os.getenv("CI")
        or os.getenv("ANSI_COLORS_DISABLED")
        or os.getenv("OPEFLOW_DISABLE_COLORS")
    )


def strip_ansi(text):
    # type: (str) -> str
    return ANSI_REMOVAL_RE.sub("", to_text(text))


def colorize(text, fg=None, bold=False):
    # type: (str, Optional[str], bool) -> str
    """Wrap ``text`` in colorama escapes, or return it bare when colors are disabled.

    :param str text: The text to color.
    :param str fg: A ``colorama.Fore`` name such as ``"green"``.
    :param bool bold: Use the bright style.
    """
    text = to_text(text)
    if _colors_disabled():
        return strip_ansi(text)
    if fg is None and not bold:
        return text
    style = colorama.Style.BRIGHT if bold else colorama.Style.NORMAL
    color = getattr(colorama.Fore, fg.upper()) if fg else ""
    return "%s%s%s%s" % (color, style, text, colorama.Style.RESET_ALL)


def verdict(passed):
    # type: (bool) -> str
    """Render a pass/fail marker for the command line summaries."""
    if passed:
        return colorize("PASS", "green", bold=True)
    return colorize("FAIL", "red", bold=True)


def status_line(label, passed, detail=""):
    # type: (str, bool, str) -> str
    line = "%s %s" % (verdict(passed), label)
    if detail:
        line = "%s (%s)" % (line, detail)
    return line
