"""Flat runtime configuration shared by the model, service, and simulator.

Every tunable constant lives here so the backend, the simulator, and the
browser client (via ``GET /config``) agree on one set of numbers.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass
from pathlib import Path

LISTEN_ADDR_ENV = "SWIPELEARN_ADDR"


@dataclass(frozen=True)
class EngineConfig:
    # ability model
    k_s: float = 0.3                     # Elo step size per answer
    ewma_alpha: float = 0.2              # recent-correct-rate memory
    score_mid: float = 500.0             # scaled score at theta = 0
    score_per_logit: float = 100.0
    score_min: int = 0
    score_max: int = 990

    # feature engine
    e_max: float = 30.0                  # score-gain normalizer (points)
    cp_c0: float = 3.0                   # completion-probability intercept
    cp_c1: float = 0.05                  # fatigue per consumed item
    cp_c2: float = 1.0                   # success-rate influence
    sigma_t: float = 0.5                 # log-time spread for on-time prob

    # gesture thresholds and card transforms (dx in card widths)
    swipe_dx_threshold: float = 0.3
    swipe_vx_threshold: float = 2.0      # card widths per second
    max_rotation_deg: float = 15.0
    next_scale_min: float = 0.9
    next_opacity_min: float = 0.5
    tap_deadzone_widths: float = 0.02    # movement below this is a tap

    # recommender
    w_gain: float = 1.0
    w_fit: float = 1.0
    skip_penalty: float = 0.5
    preload_depth: int = 2               # next views buffered behind the top card
    cr_target_beta: float = 0.2          # preferred-difficulty EWMA on engage
    initial_cr_target: float = 0.7
    initial_recent_correct_rate: float = 0.5

    # preference inference
    preference_margin: float = 0.05
    min_choices: int = 10

    # service
    item_pool_path: str = "items.json"
    event_log_path: str = "events.jsonl"
    snapshot_path: str = "snapshot.json"
    snapshot_every: int = 500            # events between snapshots; 0 disables
    listen_addr: str = "127.0.0.1:8000"

    def __post_init__(self) -> None:
        if self.k_s <= 0 or self.ewma_alpha <= 0 or self.ewma_alpha > 1:
            raise ValueError("k_s must be positive and ewma_alpha in (0, 1]")
        if self.e_max <= 0 or self.sigma_t <= 0:
            raise ValueError("e_max and sigma_t must be positive")
        if self.swipe_dx_threshold <= 0 or self.swipe_vx_threshold <= 0:
            raise ValueError("gesture thresholds must be positive")
        if min(self.w_gain, self.w_fit, self.skip_penalty) < 0:
            raise ValueError("ranking weights must be non-negative")
        if self.preload_depth < 0:
            raise ValueError("preload_depth must be non-negative")
        if not 0 < self.cr_target_beta <= 1:
            raise ValueError("cr_target_beta must be in (0, 1]")

    def ui_payload(self) -> dict:
        """Constants the browser client needs to mirror server behavior."""
        return {
            "swipe_dx_threshold": self.swipe_dx_threshold,
            "swipe_vx_threshold": self.swipe_vx_threshold,
            "max_rotation_deg": self.max_rotation_deg,
            "next_scale_min": self.next_scale_min,
            "next_opacity_min": self.next_opacity_min,
            "tap_deadzone_widths": self.tap_deadzone_widths,
        }


DEFAULT_CONFIG = EngineConfig()

_FIELD_NAMES = {f.name for f in dataclasses.fields(EngineConfig)}


def load_config(path: str | Path) -> EngineConfig:
    """Load a JSON config file; keys override dataclass defaults."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError(f"config file {path} must hold a JSON object")
    unknown = sorted(set(raw) - _FIELD_NAMES)
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")
    return EngineConfig(**raw)


def resolve_listen_addr(cfg: EngineConfig, override: str | None = None) -> tuple[str, int]:
    """Listen address precedence: CLI flag, then env var, then config file."""
    addr = override or os.environ.get(LISTEN_ADDR_ENV) or cfg.listen_addr
    host, _, port = addr.rpartition(":")
    if not host or not port.isdigit():
        raise ValueError(f"listen address must look like host:port, got {addr!r}")
    return host, int(port)
