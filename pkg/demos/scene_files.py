"""
Scene files: export, edit, validate
===================================

Templates serialize to an editable JSON format: room polygon, object
catalogue, instances, groups with curves, constraints, solver defaults.
This exports the desk scene, nudges a constraint, and parses it back.
"""

import json
from pathlib import Path

from layoutsynth import build, parse_scene, serialize_scene
from layoutsynth.sceneio import SceneFormatError

out_dir = Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

scene = build("desk")
text = serialize_scene(scene)
path = out_dir / "desk.json"
path.write_text(text)
print(f"wrote {path} ({len(text.splitlines())} lines)")

# round trip is exact
assert parse_scene(text) == scene
print("parse(serialize(scene)) == scene holds")

# hand-edit: loosen the wall constraint on the book stack
doc = json.loads(text)
for con in doc["constraints"]:
    if con["kind"] == "wall_distance":
        print(f"wall distance was {con['distance']} m; setting 0.3 m")
        con["distance"] = 0.3
edited = parse_scene(json.dumps(doc))
print(f"edited scene still valid: {len(edited.constraints)} constraints")

# the parser names the offending path on mistakes
broken = json.loads(text)
broken["constraints"][0]["kind"] = "antigravity"
try:
    parse_scene(json.dumps(broken))
except SceneFormatError as exc:
    print(f"broken file rejected: {exc}")
