"""OEIS b-files: parsing, fixtures, optional download, and alignment-tolerant comparison."""
from __future__ import annotations

import os
import re
import threading
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Mapping, Sequence

from .errors import UsageError
from .report import VerifyReport

CACHE_ENV = "ALMOST_GOLOMB_OEIS_CACHE"
OEIS_HOST = "https://oeis.org"
_ID = re.compile(r"^A\d{6}$")
_locks: dict[str, threading.Lock] = {}
_locks_guard = threading.Lock()


class BFileParseError(ValueError):
    def __init__(self, line: int, text: str, why: str):
        super().__init__(f"line {line}: {why}: {text!r}")
        self.line = line


@dataclass
class BFile:
    id: str | None
    entries: list[tuple[int, int]] = field(default_factory=list)

    def as_dict(self) -> dict[int, int]:
        return dict(self.entries)

    @property
    def offset(self) -> int | None:
        return self.entries[0][0] if self.entries else None

    def values(self) -> list[int]:
        return [v for _, v in self.entries]


def parse_bfile(text: str, id: str | None = None) -> BFile:
    """Lines ``index value``; blank lines and ``#`` comments are skipped."""
    entries: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise BFileParseError(lineno, raw, "expected two fields")
        try:
            i, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise BFileParseError(lineno, raw, "non-integer field") from None
        if entries and i <= entries[-1][0]:
            raise BFileParseError(lineno, raw, "indices must increase")
        entries.append((i, v))
    return BFile(id, entries)


def render_bfile(values: Sequence[int] | BFile, offset: int = 1, header: str | None = None) -> str:
    if isinstance(values, BFile):
        pairs = values.entries
    else:
        pairs = [(offset + k, int(v)) for k, v in enumerate(values)]
    lines = [f"# {header}"] if header else []
    lines += [f"{i} {v}" for i, v in pairs]
    return "\n".join(lines) + "\n"


def _check_id(seq_id: str) -> str:
    if not _ID.match(seq_id):
        raise UsageError(f"not an OEIS id: {seq_id!r}")
    return seq_id


def fixture_text(seq_id: str) -> str | None:
    name = f"b{_check_id(seq_id)[1:]}.txt"
    res = resources.files("almost_golomb") / "fixtures" / name
    return res.read_text() if res.is_file() else None


def cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    return Path(env) if env else Path.home() / ".cache" / "almost_golomb" / "oeis"


@dataclass
class FetchResult:
    id: str
    status: str          # "cache", "network", "fixture" or "unavailable"
    text: str | None
    error: str | None = None

    def bfile(self) -> BFile | None:
        return parse_bfile(self.text, self.id) if self.text is not None else None


def _lock(seq_id: str) -> threading.Lock:
    with _locks_guard:
        return _locks.setdefault(seq_id, threading.Lock())


def fetch(seq_id: str, network: bool = False, cache: Path | None = None,
          opener: Callable[[str], str] | None = None, timeout: float = 20.0) -> FetchResult:
    """b-file text for ``seq_id``.

    Offline, only the committed fixtures are read. With ``network`` the cache is
    tried first, then the OEIS host (storing the result in the cache), then the fixture.
    """
    _check_id(seq_id)
    error = None
    if network:
        path = (cache or cache_dir()) / f"b{seq_id[1:]}.txt"
        with _lock(seq_id):
            if path.is_file():
                return FetchResult(seq_id, "cache", path.read_text())
            url = f"{OEIS_HOST}/{seq_id}/b{seq_id[1:]}.txt"
            try:
                if opener is not None:
                    text = opener(url)
                else:
                    with urllib.request.urlopen(url, timeout=timeout) as resp:
                        text = resp.read().decode("utf-8")
                parse_bfile(text, seq_id)
                path.parent.mkdir(parents=True, exist_ok=True)
                path.write_text(text)
                return FetchResult(seq_id, "network", text)
            except (urllib.error.URLError, OSError, ValueError) as exc:
                error = str(exc)
    text = fixture_text(seq_id)
    if text is not None:
        return FetchResult(seq_id, "fixture", text, error)
    return FetchResult(seq_id, "unavailable", None, error)


def cross_check(generated: Mapping[int, int] | Sequence[int], bfile: BFile, start: int = 1,
                offsets: Sequence[int] = (0, 1, -1, 2, -2)) -> VerifyReport:
    """Compare on the overlap after shifting indices: b-file index = generated index + offset.

    A list is indexed from ``start``.  The first offset (in the given order)
    whose nonempty overlap agrees everywhere is reported.
    """
    gen = dict(generated) if isinstance(generated, Mapping) else {start + k: int(v) for k, v in enumerate(generated)}
    ref = bfile.as_dict()
    tried = {}
    for off in offsets:
        overlap = [i for i in gen if i + off in ref]
        if not overlap:
            tried[off] = "no overlap"
            continue
        bad = next((i for i in sorted(overlap) if gen[i] != ref[i + off]), None)
        if bad is None:
            return VerifyReport(f"oeis {bfile.id}", True, len(overlap), None,
                                {"offset": off, "overlap": len(overlap)})
        tried[off] = f"index {bad}: {gen[bad]} != {ref[bad + off]}"
    return VerifyReport(f"oeis {bfile.id}", False, 0, {"tried": tried})


# generators keyed by short names; values are (first index, values)

def _gen_greedy_r2(n: int):
    from .golomb import greedy
    return 1, greedy(2, n)


def _gen_beatty_r2(n: int):
    from .beatty import BeattyParams
    return 1, BeattyParams.canonical(2).values(n)[1:].tolist()


def _gen_defect(r: int, gaps: bool):
    def gen(n: int):
        from .defect import compute_defects
        cap = 64
        while True:
            ds = compute_defects(r, cap)
            if len(ds) > n + 1:
                break
            cap *= 2
        el = ds.elements.tolist()
        if gaps:
            return 1, [b - a for a, b in zip(el, el[1:])][:n]
        return 1, el[:n]
    return gen


def _gen_pell_q(n: int):
    from .ostrowski import continued_fraction
    return 0, list(continued_fraction(2, n).q)


def _gen_wall(n: int):
    from fractions import Fraction
    from .qfield import QuadExpr, floor_quad
    return 0, [floor_quad(QuadExpr(0, Fraction(m, 2), 2)) for m in range(n)]


GENERATORS: dict[str, Callable[[int], tuple[int, list]]] = {
    "greedy-r2": _gen_greedy_r2,
    "beatty-r2": _gen_beatty_r2,
    "defect-r2": _gen_defect(2, False),
    "defect-r3": _gen_defect(3, False),
    "gaps-r2": _gen_defect(2, True),
    "pell-q": _gen_pell_q,
    "wall": _gen_wall,
}

DEFAULT_PAIRS = {
    "A394217": "greedy-r2",
    "A395251": "defect-r2",
    "A395252": "defect-r3",
    "A395253": "gaps-r2",
    "A001333": "pell-q",
    "A049472": "wall",
}


def check_against(seq_id: str, generator: str | None = None, network: bool = False,
                  terms: int | None = None) -> VerifyReport:
    generator = generator or DEFAULT_PAIRS.get(seq_id)
    if generator not in GENERATORS:
        raise UsageError(f"unknown generator {generator!r}; choose from {sorted(GENERATORS)}")
    res = fetch(seq_id, network=network)
    if res.text is None:
        return VerifyReport(f"oeis {seq_id}", False, 0, {"status": "unavailable", "error": res.error})
    bf = res.bfile()
    n = terms or (bf.entries[-1][0] + 3)
    start, vals = GENERATORS[generator](n)
    rep = cross_check(vals, bf, start=start)
    rep.counters["source"] = res.status
    rep.counters["generator"] = generator
    return rep
