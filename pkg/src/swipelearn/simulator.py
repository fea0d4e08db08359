"""Simulated student populations driving the real session engine.

Each simulated student runs a live session through the identical
recommender / feature / lifecycle code paths the HTTP service uses; only
the clock (synthetic ticks) and the decision source (a swipe policy fed
by the displayed feature pentagon) differ. The resulting choice logs are
the evidence that skip/engage data carries preference signal.

Alongside the JSONL event log, ``simulate`` writes two sidecars:
``<log>.pool.json`` (the item pool, needed to re-derive displayed
features from the log) and ``<log>.meta.json`` (ground truth per session:
policy, latent traits).
"""

from __future__ import annotations

import dataclasses
import json
import math
import random
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .config import DEFAULT_CONFIG, EngineConfig
from .engine import SessionEngine, TickClock
from .events import ChoiceEvent, read_events
from .features import FeatureVector
from .items import generate_item_pool, load_item_pool, save_item_pool
from .student import LearningItem


class PolicyKind(str, Enum):
    CHALLENGE_SEEKING = "challenge_seeking"
    CHALLENGE_AVERSE = "challenge_averse"
    RANDOM = "random"
    ALWAYS_ENGAGE = "always_engage"


@dataclass(frozen=True)
class SwipePolicy:
    """Maps a displayed feature vector to an engage probability."""

    kind: PolicyKind
    pivot_cr: float = 0.6     # correctness probability where preference flips
    temperature: float = 0.1  # softness of the preference curve
    engage_prob: float = 0.5  # used by the random policy

    def engage_probability(self, fv: FeatureVector) -> float:
        if self.kind is PolicyKind.ALWAYS_ENGAGE:
            return 1.0
        if self.kind is PolicyKind.RANDOM:
            return self.engage_prob
        lean = (self.pivot_cr - fv.cr) / self.temperature
        if self.kind is PolicyKind.CHALLENGE_AVERSE:
            lean = -lean
        return 1.0 / (1.0 + math.exp(-lean)) if lean >= 0 else math.exp(lean) / (1.0 + math.exp(lean))


@dataclass
class SimConfig:
    n_students: int = 20
    n_items: int = 80
    steps_per_student: int = 60
    seed: int = 7
    policy_mix: dict[str, float] = field(
        default_factory=lambda: {"challenge_seeking": 0.5, "challenge_averse": 0.5}
    )
    output_path: str = "sim_events.jsonl"
    cancel_wiggle_prob: float = 0.15  # chance of an aborted drag before deciding

    def __post_init__(self) -> None:
        if self.n_students <= 0 or self.n_items <= 0:
            raise ValueError("n_students and n_items must be positive")
        if self.steps_per_student < 0:
            raise ValueError("steps_per_student must be non-negative")
        for kind in self.policy_mix:
            PolicyKind(kind)
        total = sum(self.policy_mix.values())
        if not math.isclose(total, 1.0, rel_tol=0, abs_tol=1e-9):
            raise ValueError(f"policy_mix must sum to 1, got {total}")


def assign_policies(mix: dict[str, float], n: int) -> list[PolicyKind]:
    """Deterministic proportional assignment (largest remainder)."""
    kinds = sorted(mix)
    exact = {k: mix[k] * n for k in kinds}
    counts = {k: int(exact[k]) for k in kinds}
    leftover = n - sum(counts.values())
    by_remainder = sorted(kinds, key=lambda k: (-(exact[k] - counts[k]), k))
    for k in by_remainder[:leftover]:
        counts[k] += 1
    out: list[PolicyKind] = []
    for k in kinds:
        out.extend([PolicyKind(k)] * counts[k])
    return out


def _student_rng(seed: int, index: int) -> random.Random:
    return random.Random(seed * 1_000_003 + index)


@dataclass
class SimResult:
    log_path: Path
    pool_path: Path
    meta_path: Path
    sessions: dict[str, dict]
    engine: SessionEngine

    def summary(self) -> dict:
        by_policy: dict[str, dict] = {}
        for meta in self.sessions.values():
            row = by_policy.setdefault(
                meta["policy"], {"sessions": 0, "engaged": 0, "skipped": 0}
            )
            row["sessions"] += 1
            row["engaged"] += meta["engaged"]
            row["skipped"] += meta["skipped"]
        return by_policy


def simulate(cfg: SimConfig, engine_cfg: EngineConfig = DEFAULT_CONFIG) -> SimResult:
    """Run the configured population; deterministic for a fixed seed."""
    log_path = Path(cfg.output_path)
    log_path.parent.mkdir(parents=True, exist_ok=True)
    if log_path.exists():
        log_path.unlink()

    # periodic snapshots are a service-persistence concern; the simulator's
    # outputs are the log and its sidecars
    engine_cfg = dataclasses.replace(engine_cfg, snapshot_every=0)
    pool = generate_item_pool(cfg.n_items, cfg.seed)
    engine = SessionEngine(pool, engine_cfg, clock=TickClock(), log_path=log_path)
    policies = assign_policies(cfg.policy_mix, cfg.n_students)

    sessions_meta: dict[str, dict] = {}
    for idx in range(cfg.n_students):
        rng = _student_rng(cfg.seed, idx)
        policy = SwipePolicy(kind=policies[idx])
        theta_star = rng.gauss(0.0, 1.0)
        tau_star = rng.gauss(0.0, 0.3)
        student_id = f"sim{idx:04d}"
        created = engine.create_session(student_id, fill=cfg.steps_per_student > 0)
        session_id = created["session_id"]
        engaged = skipped = 0
        for _ in range(cfg.steps_per_student):
            view = engine.stack_view(session_id)
            top = view["top"]
            if top is None:
                break
            fv = FeatureVector(
                e_raw=top["features"]["e"],
                cp=top["features"]["cp"],
                cr=top["features"]["cr"],
                o=top["features"]["o"],
                i=top["features"]["i"],
                normalized=tuple(top["radar"]["radii"]),
            )
            card_id = top["card_id"]
            if rng.random() < cfg.cancel_wiggle_prob:
                # an aborted drag: below both thresholds, so it cancels
                wiggle = rng.uniform(-0.15, 0.15)
                engine.gesture(session_id, card_id, "drag", dx=wiggle, vx=0.0)
                engine.gesture(session_id, card_id, "release", dx=wiggle, vx=0.0)
            if rng.random() < policy.engage_probability(fv):
                engine.gesture(session_id, card_id, "tap")
                item = engine.item_index[top["item_id"]]
                engine.answer(
                    session_id,
                    card_id,
                    correct=rng.random() < _rasch(theta_star, item.difficulty_b),
                    elapsed_s=_draw_elapsed(rng, item, tau_star, engine_cfg.sigma_t),
                )
                engaged += 1
            else:
                direction = -1.0 if rng.random() < 0.5 else 1.0
                dx = direction * rng.uniform(0.35, 0.7)
                engine.gesture(session_id, card_id, "drag", dx=dx * 0.6, vx=direction * 1.0)
                engine.gesture(
                    session_id, card_id, "release", dx=dx, vx=direction * rng.uniform(0.0, 1.5)
                )
                skipped += 1
        engine.end_session(session_id)
        sessions_meta[session_id] = {
            "student_index": idx,
            "student_id": student_id,
            "policy": policies[idx].value,
            "theta_star": theta_star,
            "tau_star": tau_star,
            "engaged": engaged,
            "skipped": skipped,
        }

    pool_path = log_path.with_suffix(log_path.suffix + ".pool.json")
    meta_path = log_path.with_suffix(log_path.suffix + ".meta.json")
    save_item_pool(pool, pool_path)
    meta_path.write_text(
        json.dumps({"seed": cfg.seed, "sessions": sessions_meta}, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    return SimResult(
        log_path=log_path,
        pool_path=pool_path,
        meta_path=meta_path,
        sessions=sessions_meta,
        engine=engine,
    )


def _rasch(theta: float, b: float) -> float:
    x = theta - b
    return 1.0 / (1.0 + math.exp(-x)) if x >= 0 else math.exp(x) / (1.0 + math.exp(x))


def _draw_elapsed(rng: random.Random, item: LearningItem, tau: float, sigma_t: float) -> float:
    return max(math.exp(rng.gauss(item.log_median_time_mu - tau, sigma_t)), 1e-3)


# ----------------------------------------------------------------------
# analysis: preference inference from the choice log alone


class PreferenceLabel(str, Enum):
    CHALLENGE_SEEKING = "challenge_seeking"
    CHALLENGE_AVERSE = "challenge_averse"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class PreferenceCall:
    session_id: str
    label: PreferenceLabel
    n_engaged: int
    n_skipped: int
    engaged_mean_cr: float | None
    skipped_mean_cr: float | None
    reason: str


def displayed_cr_by_decision(
    events: list[ChoiceEvent],
    pool: list[LearningItem],
    engine_cfg: EngineConfig = DEFAULT_CONFIG,
) -> dict[str, list[tuple[str, float]]]:
    """Per session: (decision kind, displayed correctness prob) pairs.

    Rebuilds card features by folding the log through a fresh engine, so
    the values are exactly what each card showed when the choice was made.
    """
    replayed = SessionEngine.from_events(pool, engine_cfg, events)
    return {
        session_id: [
            (e.kind, session.cards[e.card_id].features.cr)
            for e in session.events
            if e.kind in ("tap", "swipe")
        ]
        for session_id, session in replayed.sessions.items()
    }


def classify_decisions(
    session_id: str,
    decisions: list[tuple[str, float]],
    *,
    margin: float,
    min_choices: int,
) -> PreferenceCall:
    """Margin test on the mean displayed cr of engaged vs skipped cards."""
    engaged = [cr for kind, cr in decisions if kind == "tap"]
    skipped = [cr for kind, cr in decisions if kind == "swipe"]

    def call(label: PreferenceLabel, reason: str) -> PreferenceCall:
        return PreferenceCall(
            session_id=session_id,
            label=label,
            n_engaged=len(engaged),
            n_skipped=len(skipped),
            engaged_mean_cr=sum(engaged) / len(engaged) if engaged else None,
            skipped_mean_cr=sum(skipped) / len(skipped) if skipped else None,
            reason=reason,
        )

    if len(engaged) + len(skipped) < min_choices:
        return call(
            PreferenceLabel.INDETERMINATE,
            f"insufficient choices: {len(engaged) + len(skipped)} < {min_choices}",
        )
    if not engaged or not skipped:
        return call(PreferenceLabel.INDETERMINATE, "one-sided choices: need both engages and skips")
    delta = sum(skipped) / len(skipped) - sum(engaged) / len(engaged)
    if delta >= margin:
        return call(PreferenceLabel.CHALLENGE_SEEKING, f"engaged cr lower by {delta:.3f}")
    if delta <= -margin:
        return call(PreferenceLabel.CHALLENGE_AVERSE, f"engaged cr higher by {-delta:.3f}")
    return call(PreferenceLabel.INDETERMINATE, f"cr difference {delta:.3f} within margin {margin}")


def infer_preference(
    events: list[ChoiceEvent],
    session_id: str,
    pool: list[LearningItem],
    *,
    engine_cfg: EngineConfig = DEFAULT_CONFIG,
    margin: float | None = None,
    min_choices: int | None = None,
) -> PreferenceCall:
    """Classify one session's preference from the choice log alone."""
    margin = engine_cfg.preference_margin if margin is None else margin
    min_choices = engine_cfg.min_choices if min_choices is None else min_choices
    decisions = displayed_cr_by_decision(events, pool, engine_cfg).get(session_id)
    if decisions is None:
        raise KeyError(f"session {session_id!r} not present in log")
    return classify_decisions(session_id, decisions, margin=margin, min_choices=min_choices)


# ----------------------------------------------------------------------
# reporting


@dataclass
class ReportRow:
    policy: str
    sessions: int
    engagement_rate: float
    mean_cards_seen: float
    inferred: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "policy": self.policy,
            "sessions": self.sessions,
            "engagement_rate": round(self.engagement_rate, 4),
            "mean_cards_seen": round(self.mean_cards_seen, 2),
            **{f"inferred_{label}": n for label, n in sorted(self.inferred.items())},
        }


def build_report(
    events: list[ChoiceEvent],
    pool: list[LearningItem],
    meta: dict | None,
    *,
    engine_cfg: EngineConfig = DEFAULT_CONFIG,
) -> list[ReportRow]:
    """Aggregate per-policy behavior and classification outcomes."""
    if not events:
        return []
    session_ids = sorted({e.session_id for e in events})
    truth = (meta or {}).get("sessions", {})
    decision_map = displayed_cr_by_decision(events, pool, engine_cfg)
    per_session: dict[str, dict] = {}
    for sid in session_ids:
        sess_events = [e for e in events if e.session_id == sid]
        taps = sum(1 for e in sess_events if e.kind == "tap")
        swipes = sum(1 for e in sess_events if e.kind == "swipe")
        seen = sum(1 for e in sess_events if e.kind == "promote")
        label = classify_decisions(
            sid,
            decision_map.get(sid, []),
            margin=engine_cfg.preference_margin,
            min_choices=engine_cfg.min_choices,
        ).label
        per_session[sid] = {
            "policy": truth.get(sid, {}).get("policy", "unknown"),
            "taps": taps,
            "swipes": swipes,
            "seen": seen,
            "inferred": label.value,
        }
    rows = []
    for policy in sorted({row["policy"] for row in per_session.values()}):
        group = [row for row in per_session.values() if row["policy"] == policy]
        taps = sum(r["taps"] for r in group)
        swipes = sum(r["swipes"] for r in group)
        inferred: dict[str, int] = {label.value: 0 for label in PreferenceLabel}
        for r in group:
            inferred[r["inferred"]] += 1
        rows.append(
            ReportRow(
                policy=policy,
                sessions=len(group),
                engagement_rate=taps / (taps + swipes) if taps + swipes else 0.0,
                mean_cards_seen=sum(r["seen"] for r in group) / len(group),
                inferred=inferred,
            )
        )
    return rows


def render_report(rows: list[ReportRow]) -> str:
    if not rows:
        return "(empty log: no sessions to report)"
    headers = ["policy", "sessions", "engage%", "cards", "->seeking", "->averse", "->indet"]
    table = [
        [
            row.policy,
            str(row.sessions),
            f"{100 * row.engagement_rate:.1f}",
            f"{row.mean_cards_seen:.1f}",
            str(row.inferred.get("challenge_seeking", 0)),
            str(row.inferred.get("challenge_averse", 0)),
            str(row.inferred.get("indeterminate", 0)),
        ]
        for row in rows
    ]
    widths = [max(len(h), *(len(r[i]) for r in table)) for i, h in enumerate(headers)]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)),
        "  ".join("-" * w for w in widths),
    ]
    lines += ["  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)) for row in table]
    return "\n".join(lines)


def load_sidecars(log_path: str | Path) -> tuple[list[ChoiceEvent], list[LearningItem], dict | None]:
    """Load a simulator log plus its pool/meta sidecars if present.

    An empty log needs no pool (there are no features to re-derive), so the
    sidecar is only required once the log has events.
    """
    log_path = Path(log_path)
    events = read_events(log_path)
    if not events:
        return events, [], None
    pool_path = log_path.with_suffix(log_path.suffix + ".pool.json")
    meta_path = log_path.with_suffix(log_path.suffix + ".meta.json")
    if not pool_path.exists():
        raise FileNotFoundError(
            f"item pool sidecar {pool_path} not found; pass --pool to locate it"
        )
    pool = load_item_pool(pool_path)
    meta = json.loads(meta_path.read_text(encoding="utf-8")) if meta_path.exists() else None
    return events, pool, meta
