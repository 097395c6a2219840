import pytest

import corpus_data as cd
from pivotcorpus.ingest import write_collection_xml


def write_fixture_corpus(folder):
    """Collection XML files for the three fixture talks; returns the --input flags."""
    folder.mkdir(parents=True, exist_ok=True)
    en_ar, en_he, ar, he = cd.collections()
    names = {"en:ar": ("en_ar.xml", en_ar), "en:he": ("en_he.xml", en_he), "ar": ("ar.xml", ar), "he": ("he.xml", he)}
    flags = []
    for stream, (name, coll) in names.items():
        (folder / name).write_text(write_collection_xml(coll), encoding="utf-8")
        flags += ["--input", f"{stream}={folder / name}"]
    return flags


@pytest.fixture
def fixture_inputs(tmp_path):
    return write_fixture_corpus(tmp_path / "in")


def pytest_terminal_summary(terminalreporter):
    module = __import__("sys").modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
