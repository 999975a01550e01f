"""Content-addressed JSON store for torsion chains and towers."""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

from .errors import StoreCorrupt
from .ffield import POLICIES

STORE_ENV = "ELLSHEAF_STORE"
# bump when canonical root selection changes; part of every key
POLICY_VERSION = 1


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def default_store_dir() -> Path:
    env = os.environ.get(STORE_ENV)
    return Path(env) if env else Path.home() / ".cache" / "ellsheaf"


class Store:
    def __init__(self, root=None):
        self.root = Path(root) if root is not None else default_store_dir()

    def key(self, fields: dict, policy_version: int = POLICY_VERSION) -> str:
        body = dict(fields, policy_version=policy_version)
        return hashlib.sha256(canonical_dumps(body).encode()).hexdigest()

    def path(self, key):
        return self.root / key[:2] / f"{key}.json"

    def get(self, key):
        """Stored payload, or None on a miss.  Raises StoreCorrupt on digest mismatch."""
        p = self.path(key)
        if not p.exists():
            return None
        try:
            rec = json.loads(p.read_text())
            payload = rec["payload"]
            digest = rec["digest"]
        except (ValueError, KeyError, TypeError) as exc:
            raise StoreCorrupt(f"unreadable store entry {p}: {exc}") from exc
        if rec.get("key") != key or hashlib.sha256(canonical_dumps(payload).encode()).hexdigest() != digest:
            raise StoreCorrupt(f"hash mismatch in store entry {p}")
        return payload

    def put(self, key, payload):
        p = self.path(key)
        p.parent.mkdir(parents=True, exist_ok=True)
        rec = {"key": key, "digest": hashlib.sha256(canonical_dumps(payload).encode()).hexdigest(),
               "payload": payload}
        fd, tmp = tempfile.mkstemp(dir=p.parent, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            fh.write(canonical_dumps(rec))
        os.replace(tmp, p)
        return p

    def fetch(self, fields: dict, compute, strict=False):
        """(payload, status) where status is 'hit', 'miss' or 'recovered'."""
        key = self.key(fields)
        try:
            got = self.get(key)
        except StoreCorrupt:
            if strict:
                raise
            got, status = None, "recovered"
        else:
            status = "hit" if got is not None else "miss"
        if got is not None:
            return got, status
        payload = compute()
        self.put(key, payload)
        return payload, status

    def entries(self):
        return sorted(self.root.glob("??/*.json")) if self.root.exists() else []

    def check(self):
        """Keys of corrupted entries."""
        bad = []
        for p in self.entries():
            try:
                self.get(p.stem)
            except StoreCorrupt:
                bad.append(p.stem)
        return bad

    def clear(self):
        n = 0
        for p in self.entries():
            p.unlink()
            n += 1
        return n


def tate_key_fields(q, theta, phi, x, depth, policy):
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}")
    return {"kind": "tate", "q": q, "theta": theta, "module": phi, "x": x, "depth": depth, "policy": policy}
