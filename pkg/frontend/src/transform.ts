/**
 * Client-side mirror of the server's dx-driven card transforms.
 *
 * The formulas must stay in lockstep with the backend (the contract test
 * compares against fixtures generated by it); every constant comes from
 * GET /config, never from this file.
 */

import type { TransformWire, UiConfig } from "./types.js";

const clamp = (v: number, lo: number, hi: number) => Math.min(Math.max(v, lo), hi);

/** Transforms for the top and next views at a drag displacement (in widths). */
export function transformForDx(dx: number, cfg: UiConfig): TransformWire {
  const ratio = dx / cfg.swipe_dx_threshold;
  const progress = Math.min(Math.abs(dx) / cfg.swipe_dx_threshold, 1);
  return {
    top: {
      translate_x: dx,
      rotate_deg: cfg.max_rotation_deg * clamp(ratio, -1, 1),
      scale: 1,
    },
    next: {
      scale: cfg.next_scale_min + (1 - cfg.next_scale_min) * progress,
      opacity: cfg.next_opacity_min + (1 - cfg.next_opacity_min) * progress,
    },
  };
}

/** CSS transform string for the top card at dx, given its width in pixels. */
export function topCardCss(dx: number, widthPx: number, cfg: UiConfig): string {
  const t = transformForDx(dx, cfg);
  return `translateX(${t.top.translate_x * widthPx}px) rotate(${t.top.rotate_deg}deg)`;
}
