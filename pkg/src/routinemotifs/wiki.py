"""MediaWiki Action API client for revision metadata and first-edit dates.

Fetches are cached to newline-delimited files so a warm cache lets the
whole pipeline run offline; tests exercise the client against recorded
responses via the injectable ``http_get`` callable.
"""

from __future__ import annotations

import ipaddress
import json
import time as _time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .events import EventLog, EventRecord, format_timestamp, parse_timestamp

DEFAULT_ENDPOINT = "https://en.wikipedia.org/w/api.php"
USER_AGENT = "routinemotifs/0.1 (collaboration log research tool)"

HttpGet = Callable[[str, dict], dict]


class FetchError(RuntimeError):
    """HTTP or API failure that persisted through retries."""


class ArticleNotFoundError(FetchError):
    """The article does not exist or its history is unavailable."""


def _default_http_get(url: str, params: dict) -> dict:
    import requests

    resp = requests.get(url, params=params, headers={"User-Agent": USER_AGENT}, timeout=30)
    resp.raise_for_status()
    return resp.json()


class RateLimiter:
    """Token-free limiter: enforces a minimum interval between requests.

    Clock and sleep are injectable so tests can drive it with fake time.
    """

    def __init__(self, requests_per_second: float, clock=_time.monotonic, sleep=_time.sleep):
        if requests_per_second <= 0:
            raise ValueError("rate_limit must be > 0")
        self.min_interval = 1.0 / requests_per_second
        self._clock = clock
        self._sleep = sleep
        self._last: float | None = None

    def wait(self) -> None:
        now = self._clock()
        if self._last is not None:
            remaining = self.min_interval - (now - self._last)
            if remaining > 0:
                self._sleep(remaining)
                now = self._clock()
        self._last = now


@dataclass
class FetchSpec:
    titles: list[str]
    cutoff: int
    api_endpoint: str = DEFAULT_ENDPOINT
    rate_limit: float = 2.0
    cache_dir: Path = Path("./cache")
    max_retries: int = 3

    def __post_init__(self) -> None:
        self.cache_dir = Path(self.cache_dir)
        if self.rate_limit <= 0:
            raise ValueError("rate_limit must be > 0")
        if self.cutoff > int(_time.time()):
            raise ValueError("cutoff must not be in the future")


@dataclass(frozen=True)
class RevisionMeta:
    title: str
    revision_id: int
    performer_id: str
    timestamp: int
    size_bytes: int

    def to_dict(self) -> dict[str, object]:
        return {
            "title": self.title,
            "revision_id": self.revision_id,
            "performer_id": self.performer_id,
            "timestamp": format_timestamp(self.timestamp),
            "size_bytes": self.size_bytes,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "RevisionMeta":
        return cls(
            title=obj["title"],
            revision_id=int(obj["revision_id"]),
            performer_id=obj["performer_id"],
            timestamp=parse_timestamp(str(obj["timestamp"])),
            size_bytes=int(obj["size_bytes"]),
        )


def _cache_slug(title: str) -> str:
    return "".join(ch if ch.isalnum() else "_" for ch in title)


class WikiClient:
    def __init__(
        self,
        spec: FetchSpec,
        http_get: HttpGet = _default_http_get,
        clock=_time.monotonic,
        sleep=_time.sleep,
    ):
        self.spec = spec
        self._http_get = http_get
        self._limiter = RateLimiter(spec.rate_limit, clock=clock, sleep=sleep)
        self.skipped_suppressed = 0
        spec.cache_dir.mkdir(parents=True, exist_ok=True)

    # -- low-level ---------------------------------------------------------

    def _request(self, params: dict) -> dict:
        base = {"format": "json", "formatversion": "2"}
        base.update(params)
        last_exc: Exception | None = None
        for _ in range(self.spec.max_retries):
            self._limiter.wait()
            try:
                return self._http_get(self.spec.api_endpoint, base)
            except Exception as exc:  # noqa: BLE001 - retried, then surfaced
                last_exc = exc
        raise FetchError(f"request failed after {self.spec.max_retries} retries: {last_exc}")

    # -- revisions ---------------------------------------------------------

    def _revision_cache_path(self, title: str) -> Path:
        return self.spec.cache_dir / f"article_{_cache_slug(title)}.jsonl"

    def _manifest_path(self) -> Path:
        return self.spec.cache_dir / "manifest.json"

    def _load_manifest(self) -> dict:
        path = self._manifest_path()
        if path.exists():
            return json.loads(path.read_text(encoding="utf-8"))
        return {"articles": {}, "first_edits": {}}

    def _save_manifest(self, manifest: dict) -> None:
        self._manifest_path().write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

    def fetch_revisions(self, title: str) -> list[RevisionMeta]:
        """All revisions of ``title`` up to the cutoff, ascending, cached."""
        cache_path = self._revision_cache_path(title)
        manifest = self._load_manifest()
        entry = manifest["articles"].get(title)
        if entry and entry.get("cutoff") == self.spec.cutoff and cache_path.exists():
            return [
                RevisionMeta.from_dict(json.loads(line))
                for line in cache_path.read_text(encoding="utf-8").splitlines()
                if line.strip()
            ]

        revisions: list[RevisionMeta] = []
        params = {
            "action": "query",
            "prop": "revisions",
            "titles": title,
            "rvprop": "ids|timestamp|user|size",
            "rvlimit": "500",
            "rvdir": "newer",
            "rvend": format_timestamp(self.spec.cutoff),
        }
        cont: dict = {}
        while True:
            payload = self._request({**params, **cont})
            pages = payload.get("query", {}).get("pages", [])
            if not pages:
                raise ArticleNotFoundError(f"no query result for {title!r}")
            page = pages[0]
            if page.get("missing"):
                raise ArticleNotFoundError(f"article {title!r} not found")
            for rev in page.get("revisions", []):
                if "user" not in rev or rev.get("userhidden") or rev.get("suppressed"):
                    self.skipped_suppressed += 1
                    continue
                ts = parse_timestamp(rev["timestamp"])
                if ts > self.spec.cutoff:
                    continue
                revisions.append(
                    RevisionMeta(
                        title=title,
                        revision_id=int(rev["revid"]),
                        performer_id=rev["user"],
                        timestamp=ts,
                        size_bytes=int(rev.get("size", 0)),
                    )
                )
            if "continue" in payload:
                cont = dict(payload["continue"])
            else:
                break

        revisions.sort(key=lambda r: (r.timestamp, r.revision_id))
        with cache_path.open("w", encoding="utf-8") as fh:
            for rev in revisions:
                fh.write(json.dumps(rev.to_dict(), sort_keys=True) + "\n")
        manifest["articles"][title] = {
            "cutoff": self.spec.cutoff,
            "fetched_at": format_timestamp(int(_time.time())),
            "revisions": len(revisions),
        }
        self._save_manifest(manifest)
        return revisions

    # -- first edits -------------------------------------------------------

    def fetch_first_edit(self, performer_id: str) -> int | None:
        """Earliest platform contribution timestamp, or None if unresolvable.

        Anonymous (IP) performers always resolve to None: a global first
        edit is not meaningful for a shared address.
        """
        try:
            ipaddress.ip_address(performer_id)
            return None
        except ValueError:
            pass

        manifest = self._load_manifest()
        if performer_id in manifest["first_edits"]:
            cached = manifest["first_edits"][performer_id]
            return None if cached is None else parse_timestamp(cached)

        payload = self._request(
            {
                "action": "query",
                "list": "usercontribs",
                "ucuser": performer_id,
                "ucdir": "newer",
                "uclimit": "1",
                "ucprop": "timestamp",
            }
        )
        contribs = payload.get("query", {}).get("usercontribs", [])
        result = parse_timestamp(contribs[0]["timestamp"]) if contribs else None
        manifest["first_edits"][performer_id] = (
            None if result is None else format_timestamp(result)
        )
        self._save_manifest(manifest)
        return result


def revisions_to_events(by_title: dict[str, Sequence[RevisionMeta]]) -> EventLog:
    """One event per revision; size_delta is the difference of consecutive
    page sizes (the first revision's delta is its full size)."""
    events: list[EventRecord] = []
    for title in sorted(by_title):
        prev_size = 0
        for rev in by_title[title]:
            events.append(
                EventRecord(
                    artifact_id=title,
                    performer_id=rev.performer_id,
                    activity="",
                    timestamp=rev.timestamp,
                    size_delta=rev.size_bytes - prev_size,
                )
            )
            prev_size = rev.size_bytes
    return EventLog(events=events)


def export_event_log(by_title: dict[str, Sequence[RevisionMeta]], path) -> EventLog:
    """Write the derived EventLog in the documented CSV layout."""
    from .events import serialize_event_log

    log = revisions_to_events(by_title)
    Path(path).write_text(serialize_event_log(log, "csv"), encoding="utf-8")
    return log
