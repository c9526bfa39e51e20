"""Import extraction and token classification.

Changed source files are scanned line by line for import/require
statements; each extracted dotted path is classified as a specialized
technology (lexicon match), dropped (project-internal or standard
library), or counted as an external library.
"""

from __future__ import annotations

import os
import re
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from typing import Callable, Iterable, List, Optional, Tuple

from .model import ChangedFile, Config, Language, PullRequest, TokenBag

SOURCE_EXTENSIONS = {".py": Language.PYTHON, ".java": Language.JAVA, ".rb": Language.RUBY}

# Directory names that act as source roots, never as module names.
SOURCE_ROOT_NAMES = {"src", "lib", "test", "tests"}


class FileReadError(Exception):
    """A changed file's content could not be resolved."""


@dataclass(frozen=True)
class Import:
    """One extracted import. `internal` marks relative imports, which are
    project-internal by construction."""

    path: str
    internal: bool = False
    language: Language = Language.PYTHON


@dataclass(frozen=True)
class ProjectModuleIndex:
    top_level_modules: frozenset

    def __contains__(self, name: str) -> bool:
        return name in self.top_level_modules


_PY_IMPORT = re.compile(r"^\s*import\s+(.+)$")
_PY_FROM = re.compile(r"^\s*from\s+(\.*[\w.]*)\s+import\s+(.+)$")
_JAVA_IMPORT = re.compile(r"^\s*import\s+(?:static\s+)?([\w.]+)(?:\.\*)?\s*;")
_JAVA_WILDCARD = re.compile(r"^\s*import\s+(?:static\s+)?([\w.]+)\.\*\s*;")
_RUBY_REQUIRE = re.compile(r"""^\s*(require|require_relative)\s+['"]([^'"]+)['"]""")


def _strip_comment(line: str, marker: str) -> str:
    pos = line.find(marker)
    return line if pos < 0 else line[:pos]


def _py_names(clause: str) -> List[str]:
    """Split an import clause into bare names, dropping aliases."""
    names = []
    for part in clause.split(","):
        name = part.split(" as ")[0].strip()
        if name:
            names.append(name)
    return names


def _extract_python(source_text: str) -> Iterable[Tuple[str, bool]]:
    lines = source_text.splitlines()
    i = 0
    while i < len(lines):
        line = _strip_comment(lines[i], "#")
        # Fold a parenthesized from-import onto one line.
        if "(" in line and ")" not in line and _PY_FROM.match(line):
            parts = [line]
            while i + 1 < len(lines) and ")" not in parts[-1]:
                i += 1
                parts.append(_strip_comment(lines[i], "#"))
            line = " ".join(parts)
        i += 1
        m = _PY_FROM.match(line)
        if m:
            base, clause = m.group(1), m.group(2).strip()
            internal = base.startswith(".")
            base = base.lstrip(".")
            clause = clause.replace("(", " ").replace(")", " ")
            if base:
                yield base, internal
            for name in _py_names(clause):
                if name == "*" or not re.fullmatch(r"[\w.]+", name):
                    continue
                yield (f"{base}.{name}" if base else name), internal
            continue
        m = _PY_IMPORT.match(line)
        if m:
            for name in _py_names(m.group(1)):
                if re.fullmatch(r"[\w.]+", name):
                    yield name, False


def _extract_java(source_text: str) -> Iterable[Tuple[str, bool]]:
    for raw in source_text.splitlines():
        line = _strip_comment(raw, "//")
        m = _JAVA_WILDCARD.match(line)
        if m:
            yield m.group(1), False
            continue
        m = _JAVA_IMPORT.match(line)
        if m:
            yield m.group(1), False


def _extract_ruby(source_text: str) -> Iterable[Tuple[str, bool]]:
    for raw in source_text.splitlines():
        line = _strip_comment(raw, "#")
        m = _RUBY_REQUIRE.match(line)
        if m:
            kind, target = m.groups()
            dotted = target.replace("/", ".").strip(".")
            if dotted:
                yield dotted, kind == "require_relative"


_EXTRACTORS = {
    Language.PYTHON: _extract_python,
    Language.JAVA: _extract_java,
    Language.RUBY: _extract_ruby,
}


def extract_imports(source_text: str, language: Language) -> List[Import]:
    """Every imported module path as a dotted string, in source order,
    duplicates preserved. Unsupported languages yield nothing."""
    extractor = _EXTRACTORS.get(language)
    if extractor is None:
        return []
    return [Import(path, internal, language) for path, internal in extractor(source_text)]


def build_project_module_index(root: str) -> ProjectModuleIndex:
    """Top-level module names the project itself defines: source-root
    directory names and root-level source file stems."""
    if not os.path.isdir(root):
        raise FileNotFoundError(f"repository snapshot unavailable: {root}")
    modules = set()
    roots = [root] + [
        os.path.join(root, name)
        for name in ("src", "lib")
        if os.path.isdir(os.path.join(root, name))
    ]
    for base in roots:
        for entry in sorted(os.listdir(base)):
            if entry.startswith("."):
                continue
            full = os.path.join(base, entry)
            stem, ext = os.path.splitext(entry)
            if os.path.isfile(full) and ext in SOURCE_EXTENSIONS:
                modules.add(stem)
            elif os.path.isdir(full) and entry not in SOURCE_ROOT_NAMES and _has_source(full):
                modules.add(entry)
    return ProjectModuleIndex(top_level_modules=frozenset(modules))


def _has_source(directory: str) -> bool:
    for _, dirs, files in os.walk(directory):
        dirs[:] = [d for d in dirs if not d.startswith(".")]
        if any(os.path.splitext(f)[1] in SOURCE_EXTENSIONS for f in files):
            return True
    return False


def _lexicon_match(path: str, lexicon: Iterable[str]) -> bool:
    for pattern in lexicon:
        name = pattern[:-1] if pattern.endswith(".") else pattern
        if path == name or path.startswith(name + "."):
            return True
    return False


def classify_with_provenance(
    imports: Iterable,
    index: ProjectModuleIndex,
    cfg: Config,
    language: Optional[Language] = None,
) -> List[Tuple[str, str]]:
    """(token, decision) per import; decision is one of 'technology',
    'library', 'internal', 'stdlib'. Technology match wins; project-internal
    and stdlib imports are dropped."""
    decisions = []
    for imp in imports:
        if isinstance(imp, str):
            imp = Import(imp, language=language or Language.PYTHON)
        path = imp.path
        if _lexicon_match(path, cfg.tech_lexicon):
            decisions.append((path, "technology"))
            continue
        top = path.split(".")[0]
        if imp.internal or top in index.top_level_modules:
            decisions.append((path, "internal"))
            continue
        stoplist = cfg.stdlib_stoplists.get(imp.language.value, frozenset())
        if top in stoplist:
            decisions.append((path, "stdlib"))
            continue
        decisions.append((path, "library"))
    return decisions


def classify_tokens(
    imports: Iterable,
    index: ProjectModuleIndex,
    cfg: Config,
    language: Optional[Language] = None,
) -> TokenBag:
    """TokenBag over the classified imports; counts accumulate over
    duplicates."""
    libraries: Counter = Counter()
    technologies: Counter = Counter()
    for token, decision in classify_with_provenance(imports, index, cfg, language):
        if decision == "technology":
            technologies[token] += 1
        elif decision == "library":
            libraries[token] += 1
    return TokenBag(libraries=dict(libraries), technologies=dict(technologies))


def tokenbag_of_pr(
    pr: PullRequest,
    file_reader: Callable[[ChangedFile], str],
    index: ProjectModuleIndex,
    cfg: Config,
) -> Tuple[TokenBag, List[str]]:
    """Multiset-sum of per-file token bags over the PR's changed files.

    Files of unsupported or disabled languages are skipped; unreadable files
    degrade to empty contributions, recorded as warnings.
    """
    bag = TokenBag.empty()
    warnings: List[str] = []
    for cf in sorted(pr.changed_files, key=lambda f: f.path):
        if cf.language is Language.OTHER or cf.language not in cfg.languages_enabled:
            continue
        try:
            text = file_reader(cf)
        except FileReadError as exc:
            warnings.append(f"{pr.id}:{cf.path}: {exc}")
            continue
        imports = extract_imports(text, cf.language)
        bag = bag.merged(classify_tokens(imports, index, cfg))
    if cfg.binary_counts:
        bag = TokenBag(
            libraries={t: 1 for t in bag.libraries},
            technologies={t: 1 for t in bag.technologies},
        )
    return bag, warnings


def parse_pattern_file(text: str) -> Tuple[str, ...]:
    """Lexicon/stoplist format: one pattern per line, '#' comments,
    trailing '.' marks a prefix pattern."""
    patterns = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            patterns.append(line)
    return tuple(patterns)


def _load_data(name: str) -> Tuple[str, ...]:
    text = resources.files("revrec.data").joinpath(name).read_text(encoding="utf-8")
    return parse_pattern_file(text)


def default_config(**overrides) -> Config:
    """Config with the shipped technology lexicon and stdlib stoplists."""
    base = dict(
        tech_lexicon=_load_data("tech_lexicon.txt"),
        stdlib_stoplists={
            Language.PYTHON.value: frozenset(_load_data("stoplist_python.txt")),
            Language.JAVA.value: frozenset(_load_data("stoplist_java.txt")),
            Language.RUBY.value: frozenset(_load_data("stoplist_ruby.txt")),
        },
    )
    base.update(overrides)
    return Config(**base)
