"""HTTP JSON API: text understanding and text matching endpoints.

POST /api/analyze     {"str": "..."} or {"str": ["...", ...]} plus options
POST /api/match_text  {"str_a": "...", "str_b": "...", ...}

Every analyze response carries the same eight fields whether or not the call
succeeded; semantic errors travel in header.ret_code with HTTP 200, and only
undecodable request bodies produce HTTP 400. Batch requests return per-item
envelopes under "res_list". Model state is loaded once and shared immutably
across request threads.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass, replace
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .analyzer import AnalyzeSettings, Engine
from .core import AnalysisResult, Language, detect_language
from .grammar.normalize import ReferenceTime

RET_OK = "ok"

DEFAULT_MAX_BODY = 1 << 20  # 1 MiB
DEFAULT_MAX_CONCURRENCY = 8
DEFAULT_PORT = 8515

SUPPORTED_POS_ALGS = {"log_linear"}
KNOWN_POS_ALGS = {"log_linear", "crf", "dnn"}
SUPPORTED_NER_ALGS = {"fine.std"}
KNOWN_NER_ALGS = {"coarse.crf", "coarse.dnn", "coarse.lua", "fine.std", "fine.high_acc"}

_OPTION_KEYS = {
    "input_spec": {"lang"},
    "word_seg": {"enable"},
    "pos_tagging": {"enable", "alg"},
    "ner": {"enable", "alg"},
    "syntactic_parsing": {"enable"},
    "srl": {"enable"},
}


class ApiError(Exception):
    def __init__(self, code: str, message: str):
        self.code = code
        self.message = message
        super().__init__(f"{code}: {message}")


@dataclass(frozen=True)
class ApiOptions:
    lang: Language = Language.AUTO
    word_seg: bool = True
    pos_tagging: bool = True
    pos_alg: str = "log_linear"
    ner: bool = True
    ner_alg: str = "fine.std"
    syntactic_parsing: bool = False
    srl: bool = False
    reference_time: ReferenceTime | None = None


def _expect_bool(value, where: str) -> bool:
    if not isinstance(value, bool):
        raise ApiError("error.bad_option", f"{where} must be true or false")
    return value


def parse_options(body: dict) -> tuple[list[str], bool, ApiOptions]:
    """Validate the request body into text items plus resolved options.

    Returns (items, is_batch, options); raises ApiError on any violation.
    """
    if "str" not in body:
        raise ApiError("error.missing_str", "request body needs a 'str' field")
    raw = body["str"]
    if isinstance(raw, str):
        items, is_batch = [raw], False
    elif isinstance(raw, list) and all(isinstance(x, str) for x in raw):
        items, is_batch = list(raw), True
    else:
        raise ApiError("error.missing_str", "'str' must be a string or a list of strings")
    opts = ApiOptions()
    options = body.get("options", {})
    if options is None:
        options = {}
    if not isinstance(options, dict):
        raise ApiError("error.bad_option", "'options' must be an object")
    for key, value in options.items():
        if key == "reference_time":
            if not isinstance(value, str):
                raise ApiError("error.bad_option", "reference_time must be an ISO-8601 string")
            try:
                opts = replace(opts, reference_time=ReferenceTime.from_iso(value))
            except ValueError as exc:
                raise ApiError("error.bad_option", f"bad reference_time: {exc}")
            continue
        allowed = _OPTION_KEYS.get(key)
        if allowed is None:
            raise ApiError("error.bad_option", f"unknown option {key!r}")
        if not isinstance(value, dict):
            raise ApiError("error.bad_option", f"option {key!r} must be an object")
        for sub in value:
            if sub not in allowed:
                raise ApiError("error.bad_option", f"unknown option {key}.{sub}")
        if key == "input_spec" and "lang" in value:
            lang = value["lang"]
            if lang not in (Language.AUTO.value, Language.CHS.value, Language.EN.value):
                raise ApiError("error.bad_option", f"bad input_spec.lang {lang!r}")
            opts = replace(opts, lang=Language(lang))
        elif key == "word_seg" and "enable" in value:
            opts = replace(opts, word_seg=_expect_bool(value["enable"], "word_seg.enable"))
        elif key == "pos_tagging":
            if "enable" in value:
                opts = replace(
                    opts, pos_tagging=_expect_bool(value["enable"], "pos_tagging.enable")
                )
            if "alg" in value:
                alg = value["alg"]
                if alg not in KNOWN_POS_ALGS:
                    raise ApiError("error.bad_option", f"bad pos_tagging.alg {alg!r}")
                if alg not in SUPPORTED_POS_ALGS:
                    raise ApiError(
                        "error.unsupported_alg",
                        f"pos_tagging.alg {alg!r} is recognized but not provided by this build",
                    )
                opts = replace(opts, pos_alg=alg)
        elif key == "ner":
            if "enable" in value:
                opts = replace(opts, ner=_expect_bool(value["enable"], "ner.enable"))
            if "alg" in value:
                alg = value["alg"]
                if alg not in KNOWN_NER_ALGS:
                    raise ApiError("error.bad_option", f"bad ner.alg {alg!r}")
                if alg not in SUPPORTED_NER_ALGS:
                    raise ApiError(
                        "error.unsupported_alg",
                        f"ner.alg {alg!r} is recognized but not provided by this build",
                    )
                opts = replace(opts, ner_alg=alg)
        elif key == "syntactic_parsing" and "enable" in value:
            opts = replace(
                opts,
                syntactic_parsing=_expect_bool(value["enable"], "syntactic_parsing.enable"),
            )
        elif key == "srl" and "enable" in value:
            opts = replace(opts, srl=_expect_bool(value["enable"], "srl.enable"))
    return items, is_batch, opts


# ---------------------------------------------------------------------------
# envelope assembly
# ---------------------------------------------------------------------------


def _header_json(time_ms: float, core_ms: float, ret_code: str, message: str = "") -> dict:
    return {
        "time_cost_ms": round(time_ms, 3),
        "core_time_cost_ms": round(core_ms, 3),
        "ret_code": ret_code,
        "message": message,
    }


def _token_json(token) -> dict:
    return {
        "str": token.surface,
        "hit": [token.span.offset, token.span.length],
        "tag": token.pos_tag,
    }


def _entity_json(mention, engine: Engine) -> dict:
    if mention.type_id in engine.ontology:
        path = "/".join(engine.ontology.path(mention.type_id))
    else:
        path = mention.type_id
    item = {
        "str": mention.surface,
        "hit": [mention.span.offset, mention.span.length],
        "type": {"name": mention.type_id, "path": path},
        "related": list(mention.related),
    }
    if mention.meaning is not None:
        item["meaning"] = mention.meaning
    return item


def _result_envelope(result: AnalysisResult, engine: Engine) -> dict:
    return {
        "header": _header_json(
            result.header.time_cost_ms, result.header.core_time_cost_ms, result.header.ret_code
        ),
        "norm_str": result.norm_text,
        "word_list": [_token_json(t) for t in result.word_list],
        "phrase_list": [_token_json(t) for t in result.phrase_list],
        "entity_list": [_entity_json(m, engine) for m in result.entity_list],
        "syntactic_parsing_str": "",
        "srl_str": "",
        "cat_list": [],
    }


def error_envelope(code: str, message: str) -> dict:
    return {
        "header": _header_json(0.0, 0.0, code, message),
        "norm_str": "",
        "word_list": [],
        "phrase_list": [],
        "entity_list": [],
        "syntactic_parsing_str": "",
        "srl_str": "",
        "cat_list": [],
    }


def analyze_one(engine: Engine, text: str, opts: ApiOptions) -> dict:
    """Envelope for a single text item; language resolves here when auto."""
    lang = opts.lang
    if lang == Language.AUTO:
        lang = detect_language(text)
    settings = AnalyzeSettings(
        lang=lang,
        word_seg=opts.word_seg,
        pos_tagging=opts.pos_tagging,
        ner=opts.ner,
        reference_time=opts.reference_time,
    )
    started = time.perf_counter()
    result = engine.analyze(text, settings)
    total = (time.perf_counter() - started) * 1000.0
    envelope = _result_envelope(result, engine)
    envelope["header"] = _header_json(total, result.header.core_time_cost_ms, RET_OK)
    return envelope


def analyze_payload(engine: Engine, body: dict) -> dict:
    """Full /api/analyze response for a parsed JSON body."""
    started = time.perf_counter()
    try:
        items, is_batch, opts = parse_options(body)
    except ApiError as exc:
        return error_envelope(exc.code, exc.message)
    if not is_batch:
        return analyze_one(engine, items[0], opts)
    envelopes = [analyze_one(engine, text, opts) for text in items]
    total = (time.perf_counter() - started) * 1000.0
    core = sum(e["header"]["core_time_cost_ms"] for e in envelopes)
    return {
        "header": _header_json(total, core, RET_OK),
        "res_list": envelopes,
    }


def match_payload(engine: Engine, body: dict) -> dict:
    """Full /api/match_text response for a parsed JSON body."""
    started = time.perf_counter()
    header_err = None
    if "str_a" not in body or not isinstance(body.get("str_a"), str):
        header_err = ("error.missing_str_a", "request body needs a string 'str_a'")
    elif "str_b" not in body or not isinstance(body.get("str_b"), str):
        header_err = ("error.missing_str_b", "request body needs a string 'str_b'")
    if header_err:
        return {
            "header": _header_json(0.0, 0.0, header_err[0], header_err[1]),
            "score": 0.0,
            "alignment": [],
        }
    lang = Language.AUTO
    options = body.get("options") or {}
    if isinstance(options, dict):
        lang_code = (options.get("input_spec") or {}).get("lang", "auto")
        if lang_code in ("auto", "chs", "en"):
            lang = Language(lang_code)
    if lang == Language.AUTO:
        lang = detect_language(body["str_a"] + body["str_b"])
    core_start = time.perf_counter()
    result = engine.match(body["str_a"], body["str_b"], lang)
    core = (time.perf_counter() - core_start) * 1000.0
    total = (time.perf_counter() - started) * 1000.0
    return {
        "header": _header_json(total, core, RET_OK),
        "score": result.score,
        "alignment": [[i, j, w] for i, j, w in result.alignment],
    }


# ---------------------------------------------------------------------------
# HTTP server
# ---------------------------------------------------------------------------


@dataclass
class ServiceConfig:
    model_dir: str | Path
    host: str = "127.0.0.1"
    port: int = DEFAULT_PORT
    max_body_bytes: int = DEFAULT_MAX_BODY
    max_concurrency: int = DEFAULT_MAX_CONCURRENCY

    @classmethod
    def load(cls, path: str | Path | None = None, **overrides) -> "ServiceConfig":
        data: dict = {}
        if path is not None:
            with Path(path).open(encoding="utf-8") as fh:
                data = json.load(fh)
        env = os.environ
        merged = {
            "model_dir": overrides.get("model_dir")
            or data.get("model_dir")
            or env.get("TEXKIT_MODEL_DIR"),
            "host": overrides.get("host") or data.get("host") or env.get("TEXKIT_HOST", "127.0.0.1"),
            "port": int(overrides.get("port") or data.get("port") or env.get("TEXKIT_PORT", DEFAULT_PORT)),
            "max_body_bytes": int(
                overrides.get("max_body_bytes")
                or data.get("max_body_bytes")
                or env.get("TEXKIT_MAX_BODY", DEFAULT_MAX_BODY)
            ),
            "max_concurrency": int(
                overrides.get("max_concurrency")
                or data.get("max_concurrency")
                or env.get("TEXKIT_MAX_CONCURRENCY", DEFAULT_MAX_CONCURRENCY)
            ),
        }
        if not merged["model_dir"]:
            raise ValueError("model_dir must come from config, argument, or TEXKIT_MODEL_DIR")
        return cls(**merged)


class _Handler(BaseHTTPRequestHandler):
    server_version = "texkit"
    engine: Engine
    max_body: int
    gate: threading.BoundedSemaphore

    def log_message(self, fmt, *args):  # quiet by default; logs go to stderr on demand
        pass

    def _send_json(self, status: int, payload: dict) -> None:
        body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_POST(self):  # noqa: N802 (stdlib naming)
        length = int(self.headers.get("Content-Length") or 0)
        if length > self.max_body:
            self._send_json(413, error_envelope("error.body_too_large", "request body too large"))
            return
        raw = self.rfile.read(length)
        try:
            body = json.loads(raw.decode("utf-8"))
            if not isinstance(body, dict):
                raise ValueError("top-level JSON must be an object")
        except (ValueError, UnicodeDecodeError) as exc:
            self._send_json(400, error_envelope("error.bad_json", str(exc)))
            return
        with self.gate:
            if self.path == "/api/analyze":
                self._send_json(200, analyze_payload(self.engine, body))
            elif self.path == "/api/match_text":
                self._send_json(200, match_payload(self.engine, body))
            else:
                self._send_json(404, error_envelope("error.not_found", f"no route {self.path}"))

    def do_GET(self):  # noqa: N802
        self._send_json(404, error_envelope("error.not_found", "POST to /api/analyze or /api/match_text"))


def make_server(config: ServiceConfig, engine: Engine | None = None) -> ThreadingHTTPServer:
    engine = engine or Engine.load(config.model_dir)
    handler = type(
        "BoundHandler",
        (_Handler,),
        {
            "engine": engine,
            "max_body": config.max_body_bytes,
            "gate": threading.BoundedSemaphore(config.max_concurrency),
        },
    )
    return ThreadingHTTPServer((config.host, config.port), handler)


def serve(config: ServiceConfig) -> None:  # pragma: no cover - exercised via CLI
    server = make_server(config)
    host, port = server.server_address[:2]
    print(f"texkit service on http://{host}:{port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
