from __future__ import annotations

import json

import pytest

from rulediff.errors import ReproducibilityError
from rulediff.manifest import RunManifest, sha256_file


def test_digest_is_content_addressed(tmp_path):
    f1 = tmp_path / "a.txt"
    f2 = tmp_path / "b.txt"
    f1.write_text("same bytes", encoding="utf-8")
    f2.write_text("same bytes", encoding="utf-8")
    assert sha256_file(f1) == sha256_file(f2)
    f2.write_text("different", encoding="utf-8")
    assert sha256_file(f1) != sha256_file(f2)


def test_manifest_records_and_reloads(tmp_path):
    data = tmp_path / "input.json"
    data.write_text("{}", encoding="utf-8")
    out = tmp_path / "out.json"
    out.write_text("[]", encoding="utf-8")
    path = tmp_path / "manifest.json"

    manifest = RunManifest.load_or_create(path)
    digest = manifest.check_input(data, strict=False)
    manifest.record("demo", {str(data): digest}, [out])
    assert path.exists()

    again = RunManifest.load_or_create(path)
    assert again.recorded_digest(data) == digest
    assert again.recorded_digest(out) == sha256_file(out)


def test_strict_mode_rejects_changed_inputs(tmp_path):
    data = tmp_path / "input.json"
    data.write_text("first", encoding="utf-8")
    path = tmp_path / "manifest.json"
    manifest = RunManifest.load_or_create(path)
    digest = manifest.check_input(data, strict=True)  # unseen file is fine
    manifest.record("demo", {str(data): digest}, [])

    data.write_text("second", encoding="utf-8")
    reloaded = RunManifest.load_or_create(path)
    with pytest.raises(ReproducibilityError, match="input.json"):
        reloaded.check_input(data, strict=True)
    # advisory mode records the new digest instead
    fresh = reloaded.check_input(data, strict=False)
    assert fresh == sha256_file(data)


def test_manifest_file_is_sorted_json(tmp_path):
    data = tmp_path / "z.txt"
    data.write_text("x", encoding="utf-8")
    other = tmp_path / "a.txt"
    other.write_text("y", encoding="utf-8")
    path = tmp_path / "manifest.json"
    manifest = RunManifest.load_or_create(path)
    manifest.record(
        "demo",
        {
            str(data): manifest.check_input(data, False),
            str(other): manifest.check_input(other, False),
        },
        [],
    )
    parsed = json.loads(path.read_text(encoding="utf-8"))
    keys = list(parsed["artifacts"])
    assert keys == sorted(keys)
    assert parsed["version"] == 1
