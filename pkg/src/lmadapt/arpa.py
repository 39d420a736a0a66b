"""ARPA text format for backoff n-gram models (log10, tab-separated fields)."""

from __future__ import annotations

import re

from .lm import NGram, NGramModel


class ArpaFormatError(ValueError):
    """Raised for malformed ARPA files; messages carry path and line number."""


_NGRAM_HEADER = re.compile(r"^ngram (\d+)=(\d+)$")
_SECTION = re.compile(r"^\\(\d+)-grams:$")


def export_arpa(model: NGramModel, path: str) -> None:
    """Write the model in standard ARPA layout.

    Entries are sorted within each order, so identical models export to
    byte-identical files.  Log values keep seven decimals, which round-trips
    well inside 1e-6.
    """
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\\data\\\n")
        for n in range(1, model.order + 1):
            handle.write(f"ngram {n}={model.ngram_count(n)}\n")
        for n in range(1, model.order + 1):
            handle.write(f"\n\\{n}-grams:\n")
            level = model.entries[n - 1]
            for ngram in sorted(level):
                log_prob, log_bow = level[ngram][0], level[ngram][1]
                line = f"{log_prob:.7f}\t{' '.join(ngram)}"
                if log_bow is not None:
                    line += f"\t{log_bow:.7f}"
                handle.write(line + "\n")
        handle.write("\n\\end\\\n")


def import_arpa(path: str) -> NGramModel:
    """Parse an ARPA file back into a model.

    Section sizes must match the \\data\\ declarations; unknown sections,
    short/long entry lines, and non-numeric fields abort with the offending
    line number.  Imported models carry no supporting counts.
    """
    declared: dict[int, int] = {}
    entries: list[dict[NGram, list]] = []
    current_order: int | None = None
    seen_data = False
    seen_end = False
    state = "preamble"

    with open(path, encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, 1):
            line = raw.strip()
            if not line:
                continue
            if line == "\\data\\":
                if seen_data:
                    raise ArpaFormatError(f"{path}:{line_no}: duplicate \\data\\ section")
                seen_data = True
                state = "data"
                continue
            if line == "\\end\\":
                seen_end = True
                state = "done"
                continue
            section = _SECTION.match(line)
            if section is not None:
                order = int(section.group(1))
                if order not in declared:
                    raise ArpaFormatError(
                        f"{path}:{line_no}: section \\{order}-grams: was not declared in \\data\\"
                    )
                if order != (current_order or 0) + 1:
                    raise ArpaFormatError(
                        f"{path}:{line_no}: out-of-order section \\{order}-grams:"
                    )
                current_order = order
                state = "grams"
                continue
            if state == "data":
                header = _NGRAM_HEADER.match(line)
                if header is None:
                    raise ArpaFormatError(
                        f"{path}:{line_no}: malformed count declaration {line!r}"
                    )
                order, count = int(header.group(1)), int(header.group(2))
                if order != len(declared) + 1:
                    raise ArpaFormatError(
                        f"{path}:{line_no}: n-gram orders must be declared consecutively"
                    )
                declared[order] = count
                entries.append({})
                continue
            if state == "grams":
                parts = line.split()
                n = current_order
                if len(parts) not in (n + 1, n + 2):
                    raise ArpaFormatError(
                        f"{path}:{line_no}: expected log10 prob, {n} words and an "
                        f"optional backoff, got {len(parts)} fields"
                    )
                try:
                    log_prob = float(parts[0])
                except ValueError:
                    raise ArpaFormatError(
                        f"{path}:{line_no}: non-numeric probability {parts[0]!r}"
                    ) from None
                log_bow = None
                if len(parts) == n + 2:
                    try:
                        log_bow = float(parts[-1])
                    except ValueError:
                        raise ArpaFormatError(
                            f"{path}:{line_no}: non-numeric backoff weight {parts[-1]!r}"
                        ) from None
                ngram = tuple(parts[1 : n + 1])
                if ngram in entries[n - 1]:
                    raise ArpaFormatError(f"{path}:{line_no}: duplicate n-gram {' '.join(ngram)!r}")
                entries[n - 1][ngram] = [log_prob, log_bow]
                continue
            raise ArpaFormatError(f"{path}:{line_no}: unexpected content {line!r}")

    if not seen_data:
        raise ArpaFormatError(f"{path}: missing \\data\\ section")
    if not seen_end:
        raise ArpaFormatError(f"{path}: missing \\end\\ marker")
    if not declared:
        raise ArpaFormatError(f"{path}: no n-gram orders declared")
    for order, count in declared.items():
        found = len(entries[order - 1])
        if found != count:
            raise ArpaFormatError(
                f"{path}: \\data\\ declares {count} {order}-grams but {found} were listed"
            )
    vocabulary = {ngram[0] for ngram in entries[0]}
    return NGramModel(len(declared), entries, vocabulary, None)
