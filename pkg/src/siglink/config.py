"""YAML pipeline configuration: parsing and validation.

One config file drives every subcommand; command-line flags only pick
the subcommand, the config path, and the output directory. Relative
paths inside the config resolve against the config file's directory.
See the README for the full key reference.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .errors import ConfigError
from .linker import make_verifier
from .sigprob import DEFAULT_K_CAP, ProbabilityModel
from .templates import (
    EXTRACTOR_KINDS,
    ConsecutiveWords,
    ExtractOptions,
    FullAttribute,
    LastDigits,
    RandomWords,
    SignatureTemplate,
    set_key_separators,
    validate_config,
)

log = logging.getLogger(__name__)

DEFAULT_B_ID_BASE = 10_000_000


@dataclass
class SourceSpec:
    path: Path
    id_column: str | None = None
    columns: dict[str, str] = field(default_factory=dict)
    encoding: str = "utf-8-sig"


@dataclass
class LinkSettings:
    rho: float
    tau: float
    cross_source_only: bool = False
    verifier: str = "none"
    skip_elimination: bool = False


@dataclass
class TruthSpec:
    path: Path
    column_a: str = "id_a"
    column_b: str = "id_b"
    encoding: str = "utf-8-sig"


@dataclass
class GridSpec:
    a: list[float]
    b: list[float]
    rho: list[float]
    tau: list[float]

    @property
    def size(self) -> int:
        return len(self.a) * len(self.b) * len(self.rho) * len(self.tau)


@dataclass
class SynthSpec:
    n_entities: int
    records_per_entity: int
    corruption_rate: float
    seed: int


@dataclass
class PipelineConfig:
    base_dir: Path
    schema: list[str]
    inputs: dict[str, SourceSpec]
    templates: list[SignatureTemplate]
    model: ProbabilityModel | None
    link: LinkSettings | None
    extract_options: ExtractOptions
    output_dir: Path
    source_b_id_base: int = DEFAULT_B_ID_BASE
    truth: TruthSpec | None = None
    grids: GridSpec | None = None
    synth: SynthSpec | None = None

    @property
    def two_sources(self) -> bool:
        return set(self.inputs) == {"a", "b"}


def _expect(mapping: dict, key: str, kind: type, where: str) -> Any:
    if key not in mapping:
        raise ConfigError(f"{where}: missing required key {key!r}")
    value = mapping[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise ConfigError(f"{where}: key {key!r} must be {kind.__name__}, got {value!r}")
    return value


def _parse_part(raw: dict, where: str):
    kind = _expect(raw, "kind", str, where)
    cls = EXTRACTOR_KINDS.get(kind)
    if cls is None:
        raise ConfigError(
            f"{where}: unknown extractor kind {kind!r} "
            f"(known: {', '.join(sorted(EXTRACTOR_KINDS))})"
        )
    attr = _expect(raw, "attr", str, where)
    if cls is ConsecutiveWords:
        return ConsecutiveWords(attr=attr, n=_expect(raw, "n", int, where))
    if cls is RandomWords:
        return RandomWords(attr=attr, k=_expect(raw, "k", int, where))
    if cls is LastDigits:
        return LastDigits(attr=attr, d=_expect(raw, "d", int, where))
    return FullAttribute(attr=attr)


def _parse_templates(raw: Any) -> list[SignatureTemplate]:
    if not isinstance(raw, list):
        raise ConfigError("'templates' must be a list")
    out: list[SignatureTemplate] = []
    for i, entry in enumerate(raw):
        where = f"templates[{i}]"
        if not isinstance(entry, dict):
            raise ConfigError(f"{where}: must be a mapping with 'id' and 'parts'")
        tid = _expect(entry, "id", int, where)
        parts_raw = _expect(entry, "parts", list, where)
        parts = tuple(
            _parse_part(p, f"{where}.parts[{j}]") for j, p in enumerate(parts_raw)
        )
        out.append(SignatureTemplate(template_id=tid, parts=parts))
    return out


def _parse_source(raw: Any, base: Path, where: str) -> SourceSpec:
    if not isinstance(raw, dict):
        raise ConfigError(f"{where}: must be a mapping with at least 'path'")
    spec = SourceSpec(path=base / _expect(raw, "path", str, where))
    if "id_column" in raw:
        spec.id_column = _expect(raw, "id_column", str, where)
    if "encoding" in raw:
        spec.encoding = _expect(raw, "encoding", str, where)
    if "columns" in raw:
        cols = raw["columns"]
        if not isinstance(cols, dict):
            raise ConfigError(f"{where}: 'columns' must map attribute -> csv column")
        spec.columns = {str(k): str(v) for k, v in cols.items()}
    return spec


def load_config(path: str | Path) -> PipelineConfig:
    """Parse and validate a pipeline config file.

    Sections needed only by some subcommands (inputs, model, link,
    truth, grids, synth) may be absent; each subcommand checks for what
    it requires. Everything present is validated here, before any data
    is read.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    base = path.parent

    schema_raw = raw.get("schema")
    if not isinstance(schema_raw, list) or not schema_raw or not all(
        isinstance(s, str) for s in schema_raw
    ):
        raise ConfigError("'schema' must be a non-empty list of attribute names")
    schema = [str(s) for s in schema_raw]
    if len(set(schema)) != len(schema):
        raise ConfigError("'schema' contains duplicate attribute names")

    inputs: dict[str, SourceSpec] = {}
    if "inputs" in raw:
        inputs_raw = raw["inputs"]
        if not isinstance(inputs_raw, dict):
            raise ConfigError("'inputs' must map source tags to source specs")
        tags = set(inputs_raw)
        if tags not in ({"single"}, {"a", "b"}):
            raise ConfigError(
                f"'inputs' must have either key 'single' or keys 'a' and 'b', got {sorted(tags)}"
            )
        for tag in sorted(inputs_raw):
            inputs[tag] = _parse_source(inputs_raw[tag], base, f"inputs.{tag}")

    if "key_encoding" in raw:
        enc = raw["key_encoding"]
        if not isinstance(enc, dict):
            raise ConfigError("'key_encoding' must be a mapping")
        set_key_separators(
            str(enc.get("part_separator", "◦")),
            str(enc.get("token_separator", "·")),
        )

    options = ExtractOptions()
    if "extract" in raw:
        ex = raw["extract"]
        if not isinstance(ex, dict):
            raise ConfigError("'extract' must be a mapping")
        if "combination_cap" in ex:
            options.combination_cap = _expect(ex, "combination_cap", int, "extract")
        if "random_words_attr_limit" in ex:
            options.random_words_attr_limit = _expect(ex, "random_words_attr_limit", int, "extract")
        if "warn_signature_tokens" in ex:
            options.warn_signature_tokens = _expect(ex, "warn_signature_tokens", int, "extract")

    templates = _parse_templates(raw["templates"]) if "templates" in raw else []
    if templates:
        check = validate_config(templates, schema, options)
        if check.errors:
            raise ConfigError("invalid templates: " + "; ".join(check.errors))
        for warning in check.warnings:
            log.warning("%s", warning)

    model = None
    if "model" in raw:
        m = raw["model"]
        if not isinstance(m, dict):
            raise ConfigError("'model' must be a mapping with keys 'a' and 'b'")
        model = ProbabilityModel(
            a=_expect(m, "a", float, "model"),
            b=_expect(m, "b", float, "model"),
            k_cap=_expect(m, "k_cap", int, "model") if "k_cap" in m else DEFAULT_K_CAP,
        )

    link = None
    if "link" in raw:
        lk = raw["link"]
        if not isinstance(lk, dict):
            raise ConfigError("'link' must be a mapping")
        link = LinkSettings(
            rho=_expect(lk, "rho", float, "link"),
            tau=_expect(lk, "tau", float, "link"),
            cross_source_only=bool(lk.get("cross_source_only", len(inputs) == 2)),
            verifier=str(lk.get("verifier", "none")),
            skip_elimination=bool(lk.get("skip_elimination", False)),
        )
        if not 0.0 < link.rho < 1.0:
            raise ConfigError(f"link.rho must be in (0, 1), got {link.rho}")
        if not 0.0 < link.tau < 1.0:
            raise ConfigError(f"link.tau must be in (0, 1), got {link.tau}")
        make_verifier(link.verifier)  # validates the spec string
        if link.cross_source_only and inputs and set(inputs) != {"a", "b"}:
            raise ConfigError("link.cross_source_only requires two input sources 'a' and 'b'")

    truth = None
    if "truth" in raw:
        t = raw["truth"]
        if not isinstance(t, dict):
            raise ConfigError("'truth' must be a mapping with at least 'path'")
        truth = TruthSpec(path=base / _expect(t, "path", str, "truth"))
        if "column_a" in t:
            truth.column_a = _expect(t, "column_a", str, "truth")
        if "column_b" in t:
            truth.column_b = _expect(t, "column_b", str, "truth")
        if "encoding" in t:
            truth.encoding = _expect(t, "encoding", str, "truth")

    grids = None
    if "grids" in raw:
        g = raw["grids"]
        if not isinstance(g, dict):
            raise ConfigError("'grids' must be a mapping with keys a, b, rho, tau")
        def _floats(key: str) -> list[float]:
            vals = g.get(key)
            if not isinstance(vals, list) or not vals:
                raise ConfigError(f"grids.{key} must be a non-empty list")
            try:
                return [float(v) for v in vals]
            except (TypeError, ValueError):
                raise ConfigError(f"grids.{key} must contain numbers") from None
        grids = GridSpec(a=_floats("a"), b=_floats("b"), rho=_floats("rho"), tau=_floats("tau"))

    synth = None
    if "synth" in raw:
        s = raw["synth"]
        if not isinstance(s, dict):
            raise ConfigError("'synth' must be a mapping")
        synth = SynthSpec(
            n_entities=_expect(s, "n_entities", int, "synth"),
            records_per_entity=_expect(s, "records_per_entity", int, "synth"),
            corruption_rate=_expect(s, "corruption_rate", float, "synth"),
            seed=_expect(s, "seed", int, "synth"),
        )

    b_base = raw.get("source_b_id_base", DEFAULT_B_ID_BASE)
    if not isinstance(b_base, int) or b_base < 1:
        raise ConfigError(f"source_b_id_base must be a positive integer, got {b_base!r}")

    output_dir = base / str(raw.get("output_dir", "out"))

    return PipelineConfig(
        base_dir=base,
        schema=schema,
        inputs=inputs,
        templates=templates,
        model=model,
        link=link,
        extract_options=options,
        output_dir=output_dir,
        source_b_id_base=b_base,
        truth=truth,
        grids=grids,
        synth=synth,
    )
