"""Toolkit configuration: INI file with one section per pipeline stage.

Every key has a default, so an empty or missing file is valid. Unknown
sections and unknown keys are rejected by name rather than ignored, which
keeps typos from silently disabling a stage.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .hypergraph import DEFAULT_STYLES, DEFAULT_THEMES, ThemeLexicon
from .noise import CANONICAL_OP_ORDER, NoiseConfig
from .preprocess import ADAPTERS, CleanPolicy, default_strip_chars

ENV_CONFIG_VAR = "HYPERSUMM_CONFIG"

_KNOWN_KEYS = {
    "clean": {"strip_chars", "collapse_whitespace", "drop_untranslatable", "untranslatable_lexicon"},
    "preprocess": {"adapter", "target_lang"},
    "noise": {
        "seed", "speaker_mask_ratio", "infill_lambda", "infill_token_ratio",
        "merge_probability", "split_parts", "window_fraction", "enabled_ops",
        "mask_distinct_speakers",
    },
    "rouge": {"ns"},
    "graph": {"segment_size"},
    "paths": {"input", "output", "out_dir", "candidates", "references", "summaries"},
}
# [themes] and [styles] sections accept arbitrary keys: the key is the tag
# name and the value its comma-separated trigger phrases.
_FREE_SECTIONS = ("themes", "styles")


class ConfigError(ValueError):
    """Invalid configuration file or value."""


@dataclass
class ToolkitConfig:
    clean: CleanPolicy = field(default_factory=CleanPolicy)
    adapter: str = "identity"
    target_lang: str = "en"
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    rouge_ns: tuple[int, ...] = (1, 2)
    lexicon: ThemeLexicon = field(default_factory=ThemeLexicon)
    segment_size: int = 2
    paths: dict[str, str] = field(default_factory=dict)


def default_config() -> ToolkitConfig:
    return ToolkitConfig()


def load_config(path: str | Path) -> ToolkitConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as handle:
            parser.read_file(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config file {path}: {exc}") from None
    return _config_from_parser(parser)


def _config_from_parser(parser: configparser.ConfigParser) -> ToolkitConfig:
    for section in parser.sections():
        if section in _FREE_SECTIONS:
            continue
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        for key in parser[section]:
            if key not in _KNOWN_KEYS[section]:
                raise ConfigError(f"unknown config key {section}.{key}")

    cfg = ToolkitConfig()

    if parser.has_section("clean"):
        cfg.clean = _parse_clean(parser["clean"])
    if parser.has_section("preprocess"):
        section = parser["preprocess"]
        cfg.adapter = section.get("adapter", cfg.adapter)
        if cfg.adapter not in ADAPTERS:
            raise ConfigError(
                f"preprocess.adapter: unknown adapter {cfg.adapter!r};"
                f" available: {', '.join(sorted(ADAPTERS))}"
            )
        cfg.target_lang = section.get("target_lang", cfg.target_lang)
    if parser.has_section("noise"):
        cfg.noise = _parse_noise(parser["noise"])
    if parser.has_section("rouge"):
        cfg.rouge_ns = _parse_ns(parser["rouge"].get("ns", "1 2"))
    if parser.has_section("graph"):
        cfg.segment_size = _get_int(parser["graph"], "segment_size", "graph", minimum=1)
    if parser.has_section("themes") or parser.has_section("styles"):
        themes = (
            _parse_phrases(parser["themes"]) if parser.has_section("themes")
            else dict(DEFAULT_THEMES)
        )
        styles = (
            _parse_phrases(parser["styles"]) if parser.has_section("styles")
            else dict(DEFAULT_STYLES)
        )
        try:
            cfg.lexicon = ThemeLexicon(themes=themes, styles=styles)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    if parser.has_section("paths"):
        cfg.paths = {key: value for key, value in parser["paths"].items() if value}
    return cfg


def _parse_clean(section) -> CleanPolicy:
    raw_strip = section.get("strip_chars", "default")
    if raw_strip == "default":
        strip_chars = default_strip_chars()
    else:
        strip_chars = frozenset(raw_strip)
    lexicon = frozenset(section.get("untranslatable_lexicon", "").split())
    try:
        return CleanPolicy(
            strip_chars=strip_chars,
            collapse_whitespace=_get_bool(section, "collapse_whitespace", "clean", True),
            drop_untranslatable=_get_bool(section, "drop_untranslatable", "clean", False),
            untranslatable_lexicon=lexicon,
        )
    except ValueError as exc:
        raise ConfigError(f"clean: {exc}") from None


def _parse_noise(section) -> NoiseConfig:
    ops_raw = section.get("enabled_ops", " ".join(CANONICAL_OP_ORDER))
    enabled_ops = tuple(ops_raw.replace(",", " ").split())
    try:
        return NoiseConfig(
            seed=_get_int(section, "seed", "noise", minimum=0),
            speaker_mask_ratio=_get_float(section, "speaker_mask_ratio", "noise", 0.5),
            infill_lambda=_get_float(section, "infill_lambda", "noise", 3.0),
            infill_token_ratio=_get_float(section, "infill_token_ratio", "noise", 0.15),
            merge_probability=_get_float(section, "merge_probability", "noise", 0.3),
            split_parts=_get_int(section, "split_parts", "noise", minimum=2, default=2),
            window_fraction=_get_float(section, "window_fraction", "noise", 1.0),
            enabled_ops=enabled_ops,
            mask_distinct_speakers=_get_bool(section, "mask_distinct_speakers", "noise", False),
        )
    except ValueError as exc:
        raise ConfigError(f"noise: {exc}") from None


def _parse_ns(raw: str) -> tuple[int, ...]:
    try:
        ns = tuple(sorted({int(part) for part in raw.replace(",", " ").split()}))
    except ValueError:
        raise ConfigError(f"rouge.ns must be integers, got {raw!r}") from None
    if not ns or any(n < 1 for n in ns):
        raise ConfigError(f"rouge.ns must be positive integers, got {raw!r}")
    return ns


def _parse_phrases(section) -> dict[str, tuple[str, ...]]:
    out = {}
    for name, raw in section.items():
        phrases = tuple(sorted({p.strip() for p in raw.split(",") if p.strip()}))
        if not phrases:
            raise ConfigError(f"tag {name!r} has no trigger phrases")
        out[name] = phrases
    return out


def _get_bool(section, key, where, default):
    try:
        return section.getboolean(key, default)
    except ValueError:
        raise ConfigError(f"{where}.{key} must be a boolean, got {section.get(key)!r}") from None


def _get_int(section, key, where, minimum=None, default=0):
    try:
        value = section.getint(key, default)
    except ValueError:
        raise ConfigError(f"{where}.{key} must be an integer, got {section.get(key)!r}") from None
    if minimum is not None and value < minimum:
        raise ConfigError(f"{where}.{key} must be >= {minimum}, got {value}")
    return value


def _get_float(section, key, where, default):
    try:
        return section.getfloat(key, default)
    except ValueError:
        raise ConfigError(f"{where}.{key} must be a number, got {section.get(key)!r}") from None


DEFAULT_CONFIG_TEXT = """\
# hypersumm configuration. Every key below shows its default; a missing key
# or section keeps the default, and unknown keys are rejected by name.
#
# Model-training parameters (learning rate, batch sizes, warmup or max
# steps, label smoothing and similar) are out of this toolkit's scope and
# are deliberately not part of this file.

[clean]
# "default" = every Unicode punctuation character except . ? ! ' -
# Any other value is used literally, character by character.
strip_chars = default
collapse_whitespace = true
drop_untranslatable = false
# Whitespace-separated tokens to drop when drop_untranslatable is on.
untranslatable_lexicon =

[preprocess]
# Text transform applied per turn: identity, uppercase or lowercase.
adapter = identity
target_lang = en

[noise]
seed = 0
speaker_mask_ratio = 0.5
infill_lambda = 3.0
infill_token_ratio = 0.15
merge_probability = 0.3
split_parts = 2
window_fraction = 1.0
# Subset of: speaker_mask turn_split turn_merge text_infill turn_permute
# (always applied in that canonical order).
enabled_ops = speaker_mask turn_split turn_merge text_infill turn_permute
# Mask whole speaker identities instead of per-turn occurrences.
mask_distinct_speakers = false

[rouge]
ns = 1 2

[graph]
segment_size = 2

[themes]
reaction_to_robot_behavior = eye contact, facial, gesture, gestures, movement, movements, pre-programmed, scripted, tone, voice
emotional_response = comfortable, empathy, enthusiasm, friendly, nervous, trust, uncomfortable, unsettling, warm
leadership_applicability = authority, credible, credibility, in charge, leader, leadership, motivating, role model

[styles]
transformational = encouraged, inspiring, passionate, transformational, vision
transactional = checklist, instructions, reward, rewards, task focused, transactional

[paths]
# Optional fallbacks for CLI flags of the same name.
input =
output =
out_dir =
candidates =
references =
summaries =
"""
