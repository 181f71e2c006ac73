"""Rewrite bundled model assets in canonical form and refresh the manifest.

Run after editing any ``.qdm`` asset:

    python tools/refresh_assets.py

Each asset is parsed, required to be diagnostic-clean, rewritten in the
serializer's canonical form, and hashed into ``manifest.json`` so the
loader can detect corrupted or hand-edited bundles.
"""

from __future__ import annotations

import hashlib
import json
import sys
from pathlib import Path

PKG_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(PKG_ROOT / "src"))

from qsa.dsl import parse, serialize  # noqa: E402
from qsa.model import validate_model  # noqa: E402
from qsa.vocabulary import BUILTIN_VOCABULARY  # noqa: E402

ASSETS = PKG_ROOT / "src" / "qsa" / "catalog" / "assets"


def main() -> int:
    entries = []
    failed = False
    for path in sorted(ASSETS.glob("*.qdm")):
        result = parse(path.read_bytes(), BUILTIN_VOCABULARY)
        errors = [d for d in result.diagnostics if d.is_error]
        if errors or result.model is None:
            failed = True
            print(f"{path.name}: PARSE FAILED", file=sys.stderr)
            for diag in result.diagnostics:
                print(f"  {diag.render()}", file=sys.stderr)
            continue
        for diag in result.diagnostics:
            print(f"{path.name}: {diag.render()}")
        report = validate_model(result.model, BUILTIN_VOCABULARY)
        if not report.ok:
            failed = True
            print(f"{path.name}: VALIDATION FAILED\n{report.render()}", file=sys.stderr)
            continue
        canonical = serialize(result.model).encode("utf-8")
        if canonical != path.read_bytes():
            path.write_bytes(canonical)
            print(f"{path.name}: rewritten in canonical form")
        model = result.model
        entries.append(
            {
                "area": model.area.value,
                "file": path.name,
                "patterns": len(model.patterns),
                "sources": list(model.meta.sources),
                "sha256": hashlib.sha256(canonical).hexdigest(),
            }
        )
    if failed:
        return 1

    entries.sort(key=lambda e: e["area"])
    combined = "".join(f"{e['area']}:{e['sha256']}\n" for e in entries)
    manifest = {
        "areas": entries,
        "total": sum(e["patterns"] for e in entries),
        "checksum": hashlib.sha256(combined.encode("utf-8")).hexdigest(),
    }
    manifest_path = ASSETS / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    print(f"manifest.json: {manifest['total']} patterns across {len(entries)} areas")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
