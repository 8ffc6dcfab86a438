import json

import jsonschema

from morrey.report import build_report, canonical_json, determinism_hash, load_schema, write_report


def test_hash_ignores_run_info():
    a = build_report("gallery", {"seed": 0, "mode": "rational"}, "ok", {"x": 1}, 0.1)
    b = build_report("gallery", {"seed": 0, "mode": "rational"}, "ok", {"x": 1}, 9.9)
    b["run_info"]["timestamp"] = "1970-01-01T00:00:00+00:00"
    assert a["determinism_hash"] == b["determinism_hash"] == determinism_hash(b)
    c = build_report("gallery", {"seed": 1, "mode": "rational"}, "ok", {"x": 1})
    assert c["determinism_hash"] != a["determinism_hash"]


def test_canonical_json_sorted():
    assert canonical_json({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}'


def test_write_is_atomic_and_valid(tmp_path):
    report = build_report("gallery", {"seed": 0, "mode": "rational"}, "ok", {})
    path = tmp_path / "sub" / "r.json"
    write_report(path, report)
    data = json.loads(path.read_text(encoding="utf-8"))
    jsonschema.validate(data, load_schema())
    assert [p.name for p in path.parent.iterdir()] == ["r.json"]
