import re

import pytest
from hypothesis import given
from hypothesis import strategies as st

from revrec.extract import (
    FileReadError,
    Import,
    ProjectModuleIndex,
    build_project_module_index,
    classify_tokens,
    default_config,
    extract_imports,
    parse_pattern_file,
    tokenbag_of_pr,
)
from revrec.model import ChangedFile, Language, PRState, PullRequest, TokenBag


def paths(imports):
    return [i.path for i in imports]


EMPTY_INDEX = ProjectModuleIndex(top_level_modules=frozenset())


class TestExtractPython:
    def test_plain_and_from_import(self):
        source = "import vapi\nfrom vautil.validators.email import check"
        assert paths(extract_imports(source, Language.PYTHON)) == [
            "vapi",
            "vautil.validators.email",
            "vautil.validators.email.check",
        ]

    def test_empty_source(self):
        assert extract_imports("", Language.PYTHON) == []

    def test_aliases_and_multiple_names(self):
        source = "import numpy as np, scipy\nfrom a.b import c as d, e"
        assert paths(extract_imports(source, Language.PYTHON)) == [
            "numpy",
            "scipy",
            "a.b",
            "a.b.c",
            "a.b.e",
        ]

    def test_relative_imports_marked_internal(self):
        source = "from . import x\nfrom .mod import y\nimport vapi"
        imports = extract_imports(source, Language.PYTHON)
        assert [(i.path, i.internal) for i in imports] == [
            ("x", True),
            ("mod", True),
            ("mod.y", True),
            ("vapi", False),
        ]

    def test_star_import_yields_base_only(self):
        assert paths(extract_imports("from a.b import *", Language.PYTHON)) == ["a.b"]

    def test_parenthesized_multiline(self):
        source = "from pkg import (\n    one,\n    two,\n)\n"
        assert paths(extract_imports(source, Language.PYTHON)) == [
            "pkg",
            "pkg.one",
            "pkg.two",
        ]

    def test_comments_ignored(self):
        source = "# import nothing\nimport vapi  # trailing\n"
        assert paths(extract_imports(source, Language.PYTHON)) == ["vapi"]


def java_import_oracle(source):
    """Line-by-line reference for the Java import grammar: 'import a.b.C;'
    yields a.b.C, 'import a.b.*;' yields a.b."""
    out = []
    for line in source.splitlines():
        line = line.split("//")[0].strip()
        m = re.match(r"import\s+(?:static\s+)?([\w.]+?)(\.\*)?\s*;", line)
        if m:
            out.append(m.group(1))
    return out


class TestExtractJava:
    def test_wildcard_and_exact(self):
        source = "import a.b.*;\nimport a.b.C;"
        assert paths(extract_imports(source, Language.JAVA)) == java_import_oracle(source)
        assert paths(extract_imports(source, Language.JAVA)) == ["a.b", "a.b.C"]

    def test_static_import(self):
        assert paths(extract_imports("import static a.b.C;", Language.JAVA)) == ["a.b.C"]

    @given(
        st.lists(
            st.tuples(
                st.lists(
                    st.text(alphabet="abcxyz", min_size=1, max_size=4),
                    min_size=1,
                    max_size=4,
                ),
                st.booleans(),
            ),
            max_size=8,
        )
    )
    def test_matches_oracle_on_generated_imports(self, statements):
        lines = []
        for segments, wildcard in statements:
            name = ".".join(segments)
            lines.append(f"import {name}{'.*' if wildcard else ''};")
        source = "\n".join(lines)
        assert paths(extract_imports(source, Language.JAVA)) == java_import_oracle(source)


class TestExtractRuby:
    def test_require_maps_slashes_to_dots(self):
        imports = extract_imports("require 'x/y'\nrequire \"z\"", Language.RUBY)
        assert [(i.path, i.internal) for i in imports] == [("x.y", False), ("z", False)]

    def test_require_relative_is_internal(self):
        imports = extract_imports("require_relative 'helpers/util'", Language.RUBY)
        assert [(i.path, i.internal) for i in imports] == [("helpers.util", True)]


class TestExtractGeneral:
    def test_unsupported_language_yields_nothing(self):
        assert extract_imports("import x", Language.OTHER) == []

    @given(
        a=st.lists(st.sampled_from(["import x", "from a import b", "pass"]), max_size=5),
        b=st.lists(st.sampled_from(["import y", "from c.d import e", "x = 1"]), max_size=5),
    )
    def test_concatenation_equals_per_source_concat(self, a, b):
        src_a, src_b = "\n".join(a), "\n".join(b)
        combined = extract_imports(src_a + "\n" + src_b, Language.PYTHON)
        assert combined == extract_imports(src_a, Language.PYTHON) + extract_imports(
            src_b, Language.PYTHON
        )


class TestModuleIndex:
    def test_python_tree(self, tmp_path):
        (tmp_path / "app").mkdir()
        (tmp_path / "app" / "__init__.py").write_text("")
        (tmp_path / "app" / "views.py").write_text("")
        (tmp_path / "util.py").write_text("")
        index = build_project_module_index(str(tmp_path))
        assert index.top_level_modules == {"app", "util"}

    def test_empty_tree(self, tmp_path):
        assert build_project_module_index(str(tmp_path)).top_level_modules == frozenset()

    def test_src_root(self, tmp_path):
        (tmp_path / "src").mkdir()
        (tmp_path / "src" / "Main.java").write_text("")
        index = build_project_module_index(str(tmp_path))
        assert index.top_level_modules == {"Main"}

    def test_missing_tree(self, tmp_path):
        with pytest.raises(FileNotFoundError, match="repository snapshot unavailable"):
            build_project_module_index(str(tmp_path / "nope"))


CANONICAL_IMPORTS = [
    "vapi",
    "vtax",
    "vbcsdk",
    "vautil",
    "vbcsdk.keys",
    "vautil.validators.email",
    "google.appengine.ext",
    "ndb",
    "search",
    "google.appengine.api.search",
]

CANONICAL_LIBRARIES = {
    "vapi",
    "vtax",
    "vbcsdk",
    "vautil",
    "vbcsdk.keys",
    "vautil.validators.email",
}
CANONICAL_TECHNOLOGIES = {
    "google.appengine.ext",
    "ndb",
    "search",
    "google.appengine.api.search",
}


class TestClassifyTokens:
    def test_library_technology_split(self):
        cfg = default_config()
        bag = classify_tokens(CANONICAL_IMPORTS, EMPTY_INDEX, cfg)
        assert set(bag.libraries) == CANONICAL_LIBRARIES
        assert set(bag.technologies) == CANONICAL_TECHNOLOGIES

    def test_empty_imports(self):
        bag = classify_tokens([], EMPTY_INDEX, default_config())
        assert bag.is_empty()

    def test_internal_dropped_including_duplicates(self):
        index = ProjectModuleIndex(top_level_modules=frozenset({"app"}))
        bag = classify_tokens(["app.views", "app.views"], index, default_config())
        assert bag.is_empty()

    def test_internal_flag_dropped(self):
        imports = [Import("mod.y", internal=True)]
        assert classify_tokens(imports, EMPTY_INDEX, default_config()).is_empty()

    def test_stdlib_dropped_per_language(self):
        cfg = default_config()
        bag = classify_tokens(["os", "os.path"], EMPTY_INDEX, cfg, language=Language.PYTHON)
        assert bag.is_empty()
        # 'os' is not on the Java stoplist
        bag = classify_tokens(
            [Import("os", language=Language.JAVA)], EMPTY_INDEX, cfg
        )
        assert bag.libraries == {"os": 1}

    def test_counts_accumulate(self):
        bag = classify_tokens(["vapi", "vapi", "ndb"], EMPTY_INDEX, default_config())
        assert bag.libraries == {"vapi": 2}
        assert bag.technologies == {"ndb": 1}

    def test_technology_prefix_wins_over_library(self):
        cfg = default_config()
        bag = classify_tokens(["ndb.model"], EMPTY_INDEX, cfg)
        assert bag.technologies == {"ndb.model": 1}
        assert not bag.libraries

    @given(
        imports=st.lists(
            st.sampled_from(CANONICAL_IMPORTS + ["os", "app.views", "custom.lib"]), max_size=20
        )
    )
    def test_exclusivity_property(self, imports):
        index = ProjectModuleIndex(top_level_modules=frozenset({"app"}))
        bag = classify_tokens(imports, index, default_config())
        assert not set(bag.libraries) & set(bag.technologies)

    @given(
        imports=st.lists(st.sampled_from(CANONICAL_IMPORTS), max_size=15),
        extra=st.sampled_from(CANONICAL_IMPORTS),
    )
    def test_monotonicity(self, imports, extra):
        cfg = default_config()
        before = classify_tokens(imports, EMPTY_INDEX, cfg)
        after = classify_tokens(imports + [extra], EMPTY_INDEX, cfg)
        for token, count in before.libraries.items():
            assert after.libraries[token] >= count
        for token, count in before.technologies.items():
            assert after.technologies[token] >= count


def make_pr(files, **kwargs):
    defaults = dict(id="1", author="alice", created_at=1, closed_at=2, state=PRState.CLOSED)
    defaults.update(kwargs)
    return PullRequest(changed_files=tuple(files), **defaults)


class TestTokenbagOfPR:
    def test_sums_over_files(self):
        pr = make_pr(
            [
                ChangedFile("a.py", Language.PYTHON),
                ChangedFile("b.py", Language.PYTHON),
            ]
        )
        bag, warnings = tokenbag_of_pr(
            pr, lambda cf: "import vapi", EMPTY_INDEX, default_config()
        )
        assert bag.libraries == {"vapi": 2}
        assert warnings == []

    def test_non_source_files_skipped(self):
        pr = make_pr([ChangedFile("notes.md", Language.OTHER)])
        bag, warnings = tokenbag_of_pr(
            pr, lambda cf: "import vapi", EMPTY_INDEX, default_config()
        )
        assert bag.is_empty()
        assert warnings == []

    def test_read_failure_degrades_with_warning(self):
        def reader(cf):
            raise FileReadError("boom")

        pr = make_pr([ChangedFile("a.py", Language.PYTHON)])
        bag, warnings = tokenbag_of_pr(pr, reader, EMPTY_INDEX, default_config())
        assert bag.is_empty()
        assert len(warnings) == 1

    def test_binary_counts_mode(self):
        pr = make_pr(
            [
                ChangedFile("a.py", Language.PYTHON),
                ChangedFile("b.py", Language.PYTHON),
            ]
        )
        cfg = default_config(binary_counts=True)
        bag, _ = tokenbag_of_pr(pr, lambda cf: "import vapi", EMPTY_INDEX, cfg)
        assert bag.libraries == {"vapi": 1}

    def test_deterministic_regardless_of_file_order(self):
        files = [ChangedFile(f"{c}.py", Language.PYTHON) for c in "abc"]
        contents = {"a.py": "import vapi", "b.py": "import ndb", "c.py": "import vtax"}
        cfg = default_config()

        def reader(cf):
            return contents[cf.path]

        forward = tokenbag_of_pr(make_pr(files), reader, EMPTY_INDEX, cfg)[0]
        backward = tokenbag_of_pr(make_pr(files[::-1]), reader, EMPTY_INDEX, cfg)[0]
        assert forward == backward


class TestPatternFile:
    def test_comments_and_prefixes(self):
        text = "# comment\nndb\ngoogle.appengine.  # prefix\n\n"
        assert parse_pattern_file(text) == ("ndb", "google.appengine.")
