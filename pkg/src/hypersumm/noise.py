"""Seeded window-based dialogue corruption for denoising training pairs.

Five corruption strategies are applied inside one contiguous turn window, in
a fixed canonical order regardless of how the enabled subset is listed:

  * speaker_mask  - replace speaker labels with "[MASK SPEAKER]"
  * turn_split    - split the longest turn; fragments after the first are
                    anonymized with "[MASK SPEAKER]"
  * turn_merge    - merge adjacent turns at random, keeping the left turn's
                    speaker; merges cascade left to right
  * text_infill   - replace token spans with a single "[MASK]" token, span
                    lengths drawn from a Poisson distribution (clamped >= 1)
  * turn_permute  - Fisher-Yates shuffle of the window's turn order

Randomness comes from one ``random.Random`` (Mersenne Twister) stream per
(seed, interview_id, replica), derived through SHA-256 so dialogues can be
corrupted in parallel without sharing state. Every op consumes the stream in
canonical order, which makes output byte-reproducible for a fixed seed.

Each run also records a CorruptionPlan whose op trace holds the concrete
decisions (masked indices, cut points, merge flags, spans, permutation), so
replay_plan() can reproduce the corrupted dialogue without any randomness.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass, field, replace
from typing import Iterable

from .corpus import MASK_SPEAKER, CorpusError, Dialogue, Turn, turn_from_record, turn_to_record, dumps_record

MASK_TOKEN = "[MASK]"

CANONICAL_OP_ORDER = ("speaker_mask", "turn_split", "turn_merge", "text_infill", "turn_permute")

_SENTENCE_END = (".", "!", "?")


@dataclass(frozen=True)
class NoiseConfig:
    """Parameters of the corruption pipeline."""

    seed: int = 0
    speaker_mask_ratio: float = 0.5
    infill_lambda: float = 3.0
    infill_token_ratio: float = 0.15
    merge_probability: float = 0.3
    split_parts: int = 2
    window_fraction: float = 1.0
    enabled_ops: tuple[str, ...] = CANONICAL_OP_ORDER
    # Mask whole speaker identities instead of individual turn occurrences.
    mask_distinct_speakers: bool = False

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        for name in ("speaker_mask_ratio", "infill_token_ratio", "merge_probability"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {value}")
        if self.infill_lambda <= 0:
            raise ValueError(f"infill_lambda must be positive, got {self.infill_lambda}")
        if self.split_parts < 2:
            raise ValueError(f"split_parts must be >= 2, got {self.split_parts}")
        if not 0.0 < self.window_fraction <= 1.0:
            raise ValueError(f"window_fraction must be in (0, 1], got {self.window_fraction}")
        if not self.enabled_ops:
            raise ValueError("enabled_ops must not be empty")
        for op in self.enabled_ops:
            if op not in CANONICAL_OP_ORDER:
                raise ValueError(f"unknown noise op {op!r}; known: {', '.join(CANONICAL_OP_ORDER)}")


@dataclass
class OpStep:
    """One executed op with the decisions needed to replay it."""

    op: str
    args: dict


@dataclass
class CorruptionPlan:
    """Replayable description of one corruption run."""

    window_start: int
    window_len: int
    op_trace: list[OpStep] = field(default_factory=list)

    def to_record(self) -> dict:
        return {
            "window_start": self.window_start,
            "window_len": self.window_len,
            "op_trace": [{"op": step.op, "args": step.args} for step in self.op_trace],
        }

    @classmethod
    def from_record(cls, obj: dict) -> CorruptionPlan:
        return cls(
            window_start=obj["window_start"],
            window_len=obj["window_len"],
            op_trace=[OpStep(item["op"], item["args"]) for item in obj["op_trace"]],
        )


@dataclass
class DenoisePair:
    """Corrupted dialogue plus the pristine window it must reconstruct."""

    dialogue_id: str
    corrupted: Dialogue
    reconstruction_target: Dialogue
    plan: CorruptionPlan


def round_half_up(value: float) -> int:
    """Rounding rule used for all count targets: 0.5 always rounds up."""
    return int(math.floor(value + 0.5))


def rng_for_dialogue(seed: int, interview_id: str, replica: int = 0) -> random.Random:
    """Derive an independent Mersenne Twister stream per dialogue replica."""
    digest = hashlib.sha256(f"{seed}|{interview_id}|{replica}".encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _fisher_yates(items: list, rng: random.Random) -> None:
    for i in range(len(items) - 1, 0, -1):
        j = rng.randrange(i + 1)
        items[i], items[j] = items[j], items[i]


def _poisson(lam: float, rng: random.Random) -> int:
    # Knuth's inversion by multiplication of uniforms; exact for small lambda.
    threshold = math.exp(-lam)
    k = 0
    product = 1.0
    while True:
        product *= rng.random()
        if product <= threshold:
            return k
        k += 1


def _copy_turns(turns: Iterable[Turn]) -> list[Turn]:
    return [turn.copy() for turn in turns]


def _reindex(turns: list[Turn], start: int) -> list[Turn]:
    return [replace(turn, turn_index=start + i) for i, turn in enumerate(turns)]


# ---------------------------------------------------------------------------
# Window selection
# ---------------------------------------------------------------------------

def select_window(dialogue: Dialogue, cfg: NoiseConfig, rng: random.Random) -> tuple[int, int]:
    """Pick the corruption window: length from window_fraction, start uniform."""
    n = len(dialogue.turns)
    if n == 0:
        raise ValueError(f"dialogue {dialogue.interview_id!r} has no turns")
    length = min(n, max(1, round_half_up(cfg.window_fraction * n)))
    start = rng.randrange(n - length + 1)
    return start, length


# ---------------------------------------------------------------------------
# speaker_mask
# ---------------------------------------------------------------------------

def _plan_speaker_mask(window: list[Turn], ratio: float, rng: random.Random,
                       distinct: bool = False) -> dict:
    if distinct:
        speakers = sorted({turn.speaker for turn in window})
        k = min(len(speakers), round_half_up(ratio * len(speakers)))
        order = list(speakers)
        _fisher_yates(order, rng)
        chosen = set(order[:k])
        masked = [i for i, turn in enumerate(window) if turn.speaker in chosen]
    else:
        order = list(range(len(window)))
        _fisher_yates(order, rng)
        k = min(len(window), round_half_up(ratio * len(window)))
        masked = sorted(order[:k])
    return {"masked": masked}


def _exec_speaker_mask(window: list[Turn], args: dict) -> list[Turn]:
    masked = set(args["masked"])
    return [
        replace(turn, speaker=MASK_SPEAKER) if i in masked else turn.copy()
        for i, turn in enumerate(window)
    ]


def speaker_mask(window: list[Turn], ratio: float, rng: random.Random) -> list[Turn]:
    """Mask exactly round(ratio * len(window)) speakers, chosen uniformly
    without replacement. Texts are untouched."""
    _check_window(window)
    return _exec_speaker_mask(window, _plan_speaker_mask(window, ratio, rng))


# ---------------------------------------------------------------------------
# turn_split
# ---------------------------------------------------------------------------

def _plan_turn_split(window: list[Turn], parts: int) -> dict:
    # Longest turn by character count; ties go to the lowest index.
    pos = max(range(len(window)), key=lambda i: (len(window[i].text), -i))
    tokens = window[pos].text.split()
    n_parts = min(parts, len(tokens))
    if n_parts <= 1:
        return {"turn": pos, "cuts": []}
    return {"turn": pos, "cuts": _choose_cuts(tokens, n_parts)}


def _choose_cuts(tokens: list[str], parts: int) -> list[int]:
    """Token boundaries splitting ``tokens`` into ``parts`` fragments.

    Boundary b sits before tokens[b]. For each equal-length target position
    the nearest sentence-final boundary (token ending in . ! or ?) wins;
    if none is reachable, the nearest plain token boundary is used.
    """
    n = len(tokens)
    offsets = [0] * (n + 1)  # char offset of boundary b in the 1-space-joined text
    for i, token in enumerate(tokens):
        offsets[i + 1] = offsets[i] + len(token) + (1 if i + 1 < n else 0)
    total_len = offsets[n]
    sentence_bounds = {
        b for b in range(1, n) if tokens[b - 1].endswith(_SENTENCE_END)
    }

    cuts: list[int] = []
    previous = 0
    for i in range(1, parts):
        ideal = total_len * i / parts
        lo = previous + 1
        hi = n - (parts - i)  # leave room for the remaining cuts
        candidates = [b for b in sentence_bounds if lo <= b <= hi]
        pool = candidates or list(range(lo, hi + 1))
        cut = min(pool, key=lambda b: (abs(offsets[b] - ideal), b))
        cuts.append(cut)
        previous = cut
    return cuts


def _exec_turn_split(window: list[Turn], args: dict) -> list[Turn]:
    pos, cuts = args["turn"], args["cuts"]
    if not cuts:
        return _copy_turns(window)
    source = window[pos]
    tokens = source.text.split()
    bounds = [0, *cuts, len(tokens)]
    fragments = [" ".join(tokens[a:b]) for a, b in zip(bounds, bounds[1:])]
    pieces = [replace(source.copy(), text=fragments[0])]
    pieces += [
        replace(source.copy(), text=fragment, speaker=MASK_SPEAKER)
        for fragment in fragments[1:]
    ]
    return _copy_turns(window[:pos]) + pieces + _copy_turns(window[pos + 1 :])


def split_longest_turn(window: list[Turn], parts: int, rng: random.Random | None = None) -> list[Turn]:
    """Split the longest turn into ``parts`` fragments at sentence boundaries
    nearest the equal-length cut points (plain token boundaries as fallback).

    The first fragment keeps the original speaker, the rest are anonymized.
    A turn with fewer tokens than ``parts`` splits into one fragment per
    token. The cut choice is deterministic; ``rng`` is accepted only for
    signature symmetry with the other ops.
    """
    _check_window(window)
    if parts < 2:
        raise ValueError(f"parts must be >= 2, got {parts}")
    base = window[0].turn_index
    return _reindex(_exec_turn_split(window, _plan_turn_split(window, parts)), base)


# ---------------------------------------------------------------------------
# turn_merge
# ---------------------------------------------------------------------------

def _plan_turn_merge(window: list[Turn], probability: float, rng: random.Random) -> dict:
    return {"merges": [rng.random() < probability for _ in range(len(window) - 1)]}


def _exec_turn_merge(window: list[Turn], args: dict) -> list[Turn]:
    merged = [window[0].copy()]
    for do_merge, turn in zip(args["merges"], window[1:]):
        if do_merge:
            last = merged[-1]
            merged[-1] = replace(last, text=last.text + " " + turn.text)
        else:
            merged.append(turn.copy())
    return merged


def merge_turns(window: list[Turn], probability: float, rng: random.Random) -> list[Turn]:
    """Merge each adjacent pair with the given probability, left to right.

    A merged turn keeps the left turn's speaker (and every other field) and
    may merge again with its next neighbour, so runs can collapse into one
    turn. The window's token multiset is conserved.
    """
    _check_window(window)
    base = window[0].turn_index
    return _reindex(_exec_turn_merge(window, _plan_turn_merge(window, probability, rng)), base)


# ---------------------------------------------------------------------------
# text_infill
# ---------------------------------------------------------------------------

def _plan_text_infill(window: list[Turn], lam: float, token_ratio: float,
                      rng: random.Random) -> dict:
    token_lists = [turn.text.split() for turn in window]
    total = sum(len(tokens) for tokens in token_lists)
    target = token_ratio * total
    masked_flags = [[False] * len(tokens) for tokens in token_lists]
    masked_count = 0
    spans: list[list[int]] = []

    while masked_count < target - 1e-9:
        runs = _unmasked_runs(masked_flags)
        if not runs:
            break
        want = max(1, _poisson(lam, rng))
        length = min(want, max(run_len for _, _, run_len in runs))
        starts = [
            (turn_pos, run_start + offset)
            for turn_pos, run_start, run_len in runs
            for offset in range(run_len - length + 1)
        ]
        turn_pos, start = starts[rng.randrange(len(starts))]
        for j in range(start, start + length):
            masked_flags[turn_pos][j] = True
        masked_count += length
        spans.append([turn_pos, start, length])
    return {"spans": spans}


def _unmasked_runs(masked_flags: list[list[bool]]) -> list[tuple[int, int, int]]:
    runs = []
    for turn_pos, flags in enumerate(masked_flags):
        j = 0
        while j < len(flags):
            if flags[j]:
                j += 1
                continue
            start = j
            while j < len(flags) and not flags[j]:
                j += 1
            runs.append((turn_pos, start, j - start))
    return runs


def _exec_text_infill(window: list[Turn], args: dict) -> list[Turn]:
    touched: dict[int, set[int]] = {}
    for turn_pos, start, length in args["spans"]:
        touched.setdefault(turn_pos, set()).update(range(start, start + length))

    out = []
    for turn_pos, turn in enumerate(window):
        if turn_pos not in touched:
            out.append(turn.copy())
            continue
        tokens = turn.text.split()
        masked = touched[turn_pos]
        rebuilt: list[str] = []
        j = 0
        while j < len(tokens):
            if j in masked:
                rebuilt.append(MASK_TOKEN)
                while j < len(tokens) and j in masked:
                    j += 1
            else:
                rebuilt.append(tokens[j])
                j += 1
        out.append(replace(turn, text=" ".join(rebuilt)))
    return out


def infill_text(window: list[Turn], lam: float, token_ratio: float,
                rng: random.Random) -> list[Turn]:
    """Replace token spans with single "[MASK]" tokens.

    Span lengths are Poisson(lam) draws clamped to >= 1; spans are placed
    uniformly over positions where they fit inside one turn's unmasked run,
    and drawing stops once at least token_ratio of the window's tokens are
    masked (or nothing unmasked remains). Spans never cross turn boundaries.
    """
    _check_window(window)
    return _exec_text_infill(window, _plan_text_infill(window, lam, token_ratio, rng))


# ---------------------------------------------------------------------------
# turn_permute
# ---------------------------------------------------------------------------

def _plan_turn_permute(window: list[Turn], rng: random.Random) -> dict:
    order = list(range(len(window)))
    _fisher_yates(order, rng)
    return {"order": order}


def _exec_turn_permute(window: list[Turn], args: dict) -> list[Turn]:
    return [window[i].copy() for i in args["order"]]


def permute_turns(window: list[Turn], rng: random.Random) -> list[Turn]:
    """Uniform random permutation of the window's turns (Fisher-Yates).

    The (speaker, text) multiset is conserved and turn_index values are
    reassigned contiguously after the shuffle.
    """
    _check_window(window)
    base = window[0].turn_index
    return _reindex(_exec_turn_permute(window, _plan_turn_permute(window, rng)), base)


# ---------------------------------------------------------------------------
# Composition
# ---------------------------------------------------------------------------

def _check_window(window: list[Turn]) -> None:
    if not window:
        raise ValueError("window must not be empty")


_EXECUTORS = {
    "speaker_mask": _exec_speaker_mask,
    "turn_split": _exec_turn_split,
    "turn_merge": _exec_turn_merge,
    "text_infill": _exec_text_infill,
    "turn_permute": _exec_turn_permute,
}


def _plan_op(op: str, window: list[Turn], cfg: NoiseConfig, rng: random.Random) -> dict:
    if op == "speaker_mask":
        return _plan_speaker_mask(window, cfg.speaker_mask_ratio, rng,
                                  distinct=cfg.mask_distinct_speakers)
    if op == "turn_split":
        return _plan_turn_split(window, cfg.split_parts)
    if op == "turn_merge":
        return _plan_turn_merge(window, cfg.merge_probability, rng)
    if op == "text_infill":
        return _plan_text_infill(window, cfg.infill_lambda, cfg.infill_token_ratio, rng)
    if op == "turn_permute":
        return _plan_turn_permute(window, rng)
    raise ValueError(f"unknown noise op {op!r}")


def apply_window_denoise(dialogue: Dialogue, cfg: NoiseConfig, replica: int = 0) -> DenoisePair:
    """Corrupt one dialogue inside a selected window.

    Enabled ops run in canonical order; turns outside the window keep their
    content and relative order (turn_index values are renumbered so the
    corrupted dialogue stays contiguous). The reconstruction target is the
    pristine window, reindexed from 0.
    """
    rng = rng_for_dialogue(cfg.seed, dialogue.interview_id, replica)
    start, length = select_window(dialogue, cfg, rng)
    pristine = _copy_turns(dialogue.turns[start : start + length])

    window = _copy_turns(pristine)
    trace: list[OpStep] = []
    for op in CANONICAL_OP_ORDER:
        if op not in cfg.enabled_ops:
            continue
        args = _plan_op(op, window, cfg, rng)
        window = _EXECUTORS[op](window, args)
        trace.append(OpStep(op, args))

    corrupted_turns = (
        _copy_turns(dialogue.turns[:start]) + window + _copy_turns(dialogue.turns[start + length :])
    )
    corrupted = Dialogue(dialogue.interview_id, _reindex(corrupted_turns, 0))
    target = Dialogue(dialogue.interview_id, _reindex(pristine, 0))
    plan = CorruptionPlan(window_start=start, window_len=length, op_trace=trace)
    return DenoisePair(dialogue.interview_id, corrupted, target, plan)


def replay_plan(dialogue: Dialogue, plan: CorruptionPlan) -> Dialogue:
    """Re-execute a recorded op trace on the original dialogue.

    Produces the corrupted dialogue exactly, without consuming any
    randomness.
    """
    start, length = plan.window_start, plan.window_len
    if start < 0 or start + length > len(dialogue.turns):
        raise ValueError(
            f"plan window [{start}, {start + length}) does not fit dialogue"
            f" {dialogue.interview_id!r} with {len(dialogue.turns)} turns"
        )
    window = _copy_turns(dialogue.turns[start : start + length])
    for step in plan.op_trace:
        if step.op not in _EXECUTORS:
            raise ValueError(f"unknown noise op {step.op!r} in plan")
        window = _EXECUTORS[step.op](window, step.args)
    turns = (
        _copy_turns(dialogue.turns[:start]) + window + _copy_turns(dialogue.turns[start + length :])
    )
    return Dialogue(dialogue.interview_id, _reindex(turns, 0))


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def pair_to_record(pair: DenoisePair) -> dict:
    return {
        "dialogue_id": pair.dialogue_id,
        "plan": pair.plan.to_record(),
        "corrupted": [turn_to_record(t) for t in pair.corrupted.turns],
        "target": [turn_to_record(t) for t in pair.reconstruction_target.turns],
    }


def pair_from_record(obj: dict, line: int | None = None) -> DenoisePair:
    try:
        dialogue_id = obj["dialogue_id"]
        plan = CorruptionPlan.from_record(obj["plan"])
        corrupted = [turn_from_record(t, line) for t in obj["corrupted"]]
        target = [turn_from_record(t, line) for t in obj["target"]]
    except (KeyError, TypeError) as exc:
        raise CorpusError(f"invalid denoise pair record: {exc}", line) from None
    return DenoisePair(
        dialogue_id=dialogue_id,
        corrupted=Dialogue(dialogue_id, corrupted),
        reconstruction_target=Dialogue(dialogue_id, target),
        plan=plan,
    )


def serialize_pairs(pairs: Iterable[DenoisePair]) -> str:
    return "".join(dumps_record(pair_to_record(pair)) + "\n" for pair in pairs)


def parse_pairs(stream: Iterable[str]) -> list[DenoisePair]:
    pairs = []
    for line_no, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"invalid JSON record: {exc.msg}", line_no) from None
        pairs.append(pair_from_record(obj, line_no))
    return pairs
