"""Run manifest: content digests of pipeline inputs and outputs.

Every CLI stage records what it read and wrote. In strict mode a stage
refuses to run when a file it reads no longer matches the digest the
manifest recorded for it, which catches silently edited intermediates
between stages.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .errors import ReproducibilityError


def sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


class RunManifest:
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.data = {"version": 1, "artifacts": {}}

    @classmethod
    def load_or_create(cls, path: str | Path) -> "RunManifest":
        manifest = cls(path)
        if manifest.path.exists():
            manifest.data = json.loads(manifest.path.read_text(encoding="utf-8"))
            if "artifacts" not in manifest.data:
                raise ReproducibilityError(f"{path} is not a run manifest")
        return manifest

    def _key(self, path: str | Path) -> str:
        return str(Path(path).resolve())

    def recorded_digest(self, path: str | Path) -> str | None:
        entry = self.data["artifacts"].get(self._key(path))
        return entry["sha256"] if entry else None

    def check_input(self, path: str | Path, strict: bool) -> str:
        """Digest a file about to be read; in strict mode a mismatch against
        the recorded digest is a reproducibility error."""
        digest = sha256_file(path)
        recorded = self.recorded_digest(path)
        if strict and recorded is not None and recorded != digest:
            raise ReproducibilityError(
                f"{path} changed since the manifest recorded it "
                f"(expected {recorded[:12]}, found {digest[:12]})"
            )
        return digest

    def record(
        self,
        command: str,
        inputs: dict[str, str],
        outputs: list[str | Path],
    ) -> None:
        """Store digests for everything the command touched.

        Inputs are recorded too (at the digest the command actually read),
        so a later strict run notices when any file drifted, not only the
        outputs of earlier stages.
        """
        for path, digest in inputs.items():
            self.data["artifacts"][self._key(path)] = {
                "sha256": digest,
                "command": command,
                "role": "input",
            }
        for path in outputs:
            self.data["artifacts"][self._key(path)] = {
                "sha256": sha256_file(path),
                "command": command,
                "role": "output",
                "inputs": {self._key(p): d for p, d in inputs.items()},
            }
        self.save()

    def save(self) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.write_text(
            json.dumps(self.data, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
