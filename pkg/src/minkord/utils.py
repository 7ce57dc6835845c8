from __future__ import annotations
from fractions import Fraction
from pathlib import Path
import re
from typing import Any, Iterable, Iterator, List, Sequence, TextIO, Tuple, Union


# names of events and paths, as written in structure, pairs and coord files
TOKEN_RE = re.compile(r"[A-Za-z0-9_.-]+")


def is_token(text: str) -> bool:
    """check whether the text is a valid event or path name

    Parameters
    ----------
    text : str
        the candidate name

    Returns
    -------
    bool
        whether the text matches [A-Za-z0-9_.-]+
    """
    return TOKEN_RE.fullmatch(text) is not None


def read_document(data: Union[str, TextIO]) -> str:
    """Read a line-oriented document into a single string

    Parameters
    ----------
    data : Union[str, TextIO]
        the document text, or an open text stream

    Returns
    -------
    str
        the document text

    Raises
    ------
    ValueError
        if the parameter is neither a string nor a readable stream
    """
    if isinstance(data, str):
        return data
    if hasattr(data, "read"):
        return data.read()
    raise ValueError("Invalid input for document argument")


def is_file_reference(data: Any) -> bool:
    """determine whether data refers to a file rather than holding document text

    Parameters
    ----------
    data : Any
        a `Path`, or a string that is either a file name or document text

    Returns
    -------
    bool
        True for `Path` objects and for single-line strings naming an existing file
    """
    if isinstance(data, Path):
        return True
    if isinstance(data, str) and "\n" not in data and data.strip():
        return Path(data).expanduser().is_file()
    return False


def iter_records(text: str) -> Iterator[Tuple[int, List[str]]]:
    """Split a line-oriented document into whitespace-separated records

    Blank lines and lines starting with `#` are skipped.

    Parameters
    ----------
    text : str
        the document text

    Returns
    -------
    Iterator[Tuple[int, List[str]]]
        the 1-based line number and the tokens of every record line
    """
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield line_no, stripped.split()


def parse_rational(text: str) -> Fraction:
    """Parse an exact rational written as an integer or as `p/q`

    Parameters
    ----------
    text : str
        the rational literal

    Returns
    -------
    Fraction
        the reduced rational

    Raises
    ------
    ValueError
        if the literal is not an integer or a `p/q` fraction
    """
    if not re.fullmatch(r"[+-]?\d+(/\d+)?", text):
        raise ValueError(f'malformed rational "{text}"')
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise ValueError(f'malformed rational "{text}": zero denominator')


def format_rational(value: Fraction) -> str:
    """inverse of `parse_rational`: integers print bare, others as `p/q`"""
    return str(Fraction(value))


def split_names(text: str) -> List[str]:
    """Split a comma separated list of names, as given on the command line

    Parameters
    ----------
    text : str
        e.g. "c,a,b"

    Returns
    -------
    List[str]
        the names in the given order, empty items removed

    Raises
    ------
    ValueError
        if any item is not a valid name
    """
    names = [item.strip() for item in text.split(",") if item.strip()]
    for name in names:
        if not is_token(name):
            raise ValueError(f'malformed token "{name}"')
    return names


def format_tuple(items: Iterable[Any]) -> str:
    """format a witness or chain as `(a,b,c)`"""
    return "(" + ",".join(str(item) for item in items) + ")"


def is_strictly_between(x: Fraction, y: Fraction, z: Fraction) -> bool:
    """whether y lies strictly between x and z on the number line"""
    return x < y < z or z < y < x


def up_to_reversal(seq: Sequence[Any]) -> Tuple[Any, ...]:
    """the lexicographically smaller of a sequence and its reverse

    Used to compare sequences that are only defined up to reversal.
    """
    forward = tuple(seq)
    backward = tuple(reversed(forward))
    return min(forward, backward)
