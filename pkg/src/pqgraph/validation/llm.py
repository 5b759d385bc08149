"""HTTP client for the local inference endpoint.

Wire contract: POST {endpoint}/api/generate with body
{"model": ..., "prompt": ..., "stream": false, "options": {...}}; the
response JSON carries the generated text in its "response" field. The
generated text is expected to contain a JSON object with valid/confidence/
reasoning; anything unparseable degrades to the parse-failure verdict
rather than failing the item.
"""

from __future__ import annotations

import json
import re
from typing import Any

import requests

from ..errors import EndpointUnavailableError
from .models import PARSE_FAILURE, Verdict
from .prompts import render_prompt

GENERATE_PATH = "/api/generate"

_JSON_OBJECT = re.compile(r"\{.*\}", re.DOTALL)
_VALID_FLAG = re.compile(r"valid\s*[=:]\s*(true|false)", re.IGNORECASE)
_CONFIDENCE = re.compile(r"confidence\s*[=:]\s*([01](?:\.\d+)?|\.\d+)", re.IGNORECASE)


def parse_verdict(text: str) -> Verdict:
    """Best-effort extraction of a verdict from generated text."""
    candidate = text.strip()
    for attempt in (candidate, *(m.group(0) for m in [_JSON_OBJECT.search(candidate)] if m)):
        try:
            obj = json.loads(attempt)
        except (json.JSONDecodeError, TypeError):
            continue
        if isinstance(obj, dict) and "valid" in obj:
            try:
                conf = float(obj.get("confidence", 0.0))
            except (TypeError, ValueError):
                conf = 0.0
            return Verdict(
                valid=bool(obj["valid"]),
                confidence=min(1.0, max(0.0, conf)),
                reasoning=str(obj.get("reasoning", "")),
                source="llm",
            )
    flag = _VALID_FLAG.search(candidate)
    if flag:
        conf_match = _CONFIDENCE.search(candidate)
        conf = float(conf_match.group(1)) if conf_match else 0.0
        return Verdict(
            valid=flag.group(1).lower() == "true",
            confidence=min(1.0, max(0.0, conf)),
            reasoning=candidate[:200],
            source="llm",
        )
    return PARSE_FAILURE


class LlmClient:
    def __init__(self, settings):
        self.settings = settings
        self._session = requests.Session()

    def close(self):
        self._session.close()

    def _generate(self, prompt: str) -> str:
        body = {
            "model": self.settings.model_name,
            "prompt": prompt,
            "stream": False,
            "options": {"temperature": 0.2},
        }
        url = self.settings.endpoint.rstrip("/") + GENERATE_PATH
        last_error: Exception | None = None
        for _ in range(2):  # one retry
            try:
                resp = self._session.post(url, json=body, timeout=self.settings.request_timeout_seconds)
                resp.raise_for_status()
                payload = resp.json()
                return str(payload.get("response", ""))
            except (requests.ConnectionError, requests.Timeout) as exc:
                last_error = exc
            except (requests.HTTPError, ValueError):
                # A reachable-but-broken endpoint yields a parse failure for
                # this vote instead of stalling the item.
                return ""
        raise EndpointUnavailableError(f"inference endpoint unreachable: {last_error}")

    def validate_edge(self, edge, graph, votes: int) -> list[Verdict]:
        prompt = render_prompt(edge, graph)
        return [parse_verdict(self._generate(prompt)) for _ in range(votes)]
