/**
 * Card stack view: renders the top and next cards, turns pointer input
 * into drag/release/tap calls, and animates what the server resolves.
 *
 * The client previews transforms optimistically while dragging but never
 * decides swipe vs cancel itself; the release response is authoritative.
 * While a drag is in progress the next view's radar must not animate.
 */

import type { StackApi } from "./api.js";
import { radarSvg } from "./radar.js";
import { topCardCss, transformForDx } from "./transform.js";
import type { CardPayload, GestureResult, StackPayload, UiConfig } from "./types.js";

export interface StackViewState {
  topCard: CardPayload | null;
  nextCard: CardPayload | null;
  drag: number | null; // current dx in widths, null when idle
  pending: boolean; // a mutating request is in flight
}

export interface StackCallbacks {
  onEngaged?(itemRef: string, cardId: string): void;
  onStackChanged?(stack: StackPayload): void;
  onConnectionLost?(): void;
}

const DRAG_POST_INTERVAL_MS = 120;
const FALLBACK_WIDTH_PX = 300;

export class StackView {
  readonly state: StackViewState = { topCard: null, nextCard: null, drag: null, pending: false };

  private pointerId: number | null = null;
  private startX = 0;
  private lastDx = 0;
  private lastMoveAt = 0;
  private vx = 0;
  private exceededDeadzone = false;
  private lastDragPostAt = 0;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: StackApi,
    private readonly cfg: UiConfig,
    private readonly sessionId: string,
    private readonly callbacks: StackCallbacks = {},
    private readonly now: () => number = () => Date.now(),
  ) {
    root.classList.add("stack");
    root.addEventListener("pointerdown", this.onPointerDown);
    root.addEventListener("pointermove", this.onPointerMove);
    root.addEventListener("pointerup", this.onPointerUp);
    root.addEventListener("pointercancel", this.onPointerAbort);
  }

  setStack(stack: StackPayload): void {
    this.state.topCard = stack.top;
    this.state.nextCard = stack.next;
    this.state.drag = null;
    this.render();
    this.callbacks.onStackChanged?.(stack);
  }

  /** Rebuild the DOM for the current state. */
  render(): void {
    this.root.textContent = "";
    const doc = this.root.ownerDocument;
    if (this.state.nextCard) {
      this.root.appendChild(this.cardEl(doc, this.state.nextCard, "next"));
    }
    if (this.state.topCard) {
      this.root.appendChild(this.cardEl(doc, this.state.topCard, "top"));
    } else {
      const done = doc.createElement("div");
      done.className = "stack-empty";
      done.textContent = "No more recommendations in this session.";
      this.root.appendChild(done);
    }
    this.applyDragVisuals(this.state.drag ?? 0);
  }

  private cardEl(doc: Document, card: CardPayload, role: "top" | "next"): HTMLElement {
    const el = doc.createElement("div");
    el.className = `card card-${role}`;
    el.dataset.cardId = card.card_id;
    el.dataset.role = role;
    // information hiding: only the front card's radar animates, and only
    // while no drag is rearranging the stack
    const animated = role === "top" && card.radar_animated && this.state.drag === null;
    el.appendChild(radarSvg(doc, card.radar, { animated, showValues: role === "top" }));
    const caption = doc.createElement("div");
    caption.className = "card-caption";
    caption.textContent = card.item_id;
    el.appendChild(caption);
    return el;
  }

  private topEl(): HTMLElement | null {
    return this.root.querySelector<HTMLElement>(".card-top");
  }

  private nextEl(): HTMLElement | null {
    return this.root.querySelector<HTMLElement>(".card-next");
  }

  private widthPx(): number {
    const rect = this.topEl()?.getBoundingClientRect();
    return rect && rect.width > 0 ? rect.width : FALLBACK_WIDTH_PX;
  }

  private applyDragVisuals(dx: number): void {
    const top = this.topEl();
    const next = this.nextEl();
    if (top) {
      top.style.transform = topCardCss(dx, this.widthPx(), this.cfg);
    }
    if (next) {
      const t = transformForDx(dx, this.cfg);
      next.style.transform = `scale(${t.next.scale})`;
      next.style.opacity = String(t.next.opacity);
      // a mid-drag next view never animates its radar
      next.querySelector(".radar-value")?.classList.remove("radar-animated");
    }
  }

  // ------------------------------------------------------------------
  // pointer handling

  private onPointerDown = (ev: PointerEvent): void => {
    if (this.state.pending || !this.state.topCard || this.pointerId !== null) {
      return;
    }
    const target = ev.target as Element | null;
    if (!target?.closest(".card-top")) {
      return;
    }
    this.pointerId = ev.pointerId ?? 1;
    this.startX = ev.clientX;
    this.lastDx = 0;
    this.vx = 0;
    this.lastMoveAt = this.now();
    this.exceededDeadzone = false;
    const top = this.topEl();
    if (top?.setPointerCapture) {
      try {
        top.setPointerCapture(this.pointerId);
      } catch {
        // jsdom and some browsers refuse capture outside real gestures
      }
    }
  };

  private onPointerMove = (ev: PointerEvent): void => {
    if (this.pointerId === null || this.state.pending || !this.state.topCard) {
      return;
    }
    const dx = (ev.clientX - this.startX) / this.widthPx();
    const t = this.now();
    const dtS = Math.max((t - this.lastMoveAt) / 1000, 1e-3);
    this.vx = (dx - this.lastDx) / dtS;
    this.lastDx = dx;
    this.lastMoveAt = t;
    if (Math.abs(dx) >= this.cfg.tap_deadzone_widths) {
      this.exceededDeadzone = true;
    }
    if (!this.exceededDeadzone) {
      return;
    }
    this.state.drag = dx;
    this.applyDragVisuals(dx);
    if (t - this.lastDragPostAt >= DRAG_POST_INTERVAL_MS) {
      this.lastDragPostAt = t;
      void this.api
        .gesture(this.sessionId, this.state.topCard.card_id, "drag", dx, this.vx)
        .catch(() => this.freeze());
    }
  };

  private onPointerUp = (ev: PointerEvent): void => {
    if (this.pointerId === null || !this.state.topCard) {
      return;
    }
    this.pointerId = null;
    const card = this.state.topCard;
    if (!this.exceededDeadzone) {
      // short press without movement: a tap
      void this.runPending(async () => {
        const result = await this.api.gesture(this.sessionId, card.card_id, "tap");
        if (result.resolution === "engaged" && result.item_ref) {
          this.callbacks.onEngaged?.(result.item_ref, card.card_id);
          this.render();
        }
      });
      return;
    }
    const dx = (ev.clientX - this.startX) / this.widthPx();
    void this.runPending(async () => {
      // make sure the server saw a drag before the release
      await this.api.gesture(this.sessionId, card.card_id, "drag", dx, this.vx);
      const result = await this.api.gesture(this.sessionId, card.card_id, "release", dx, this.vx);
      this.settleRelease(result, dx);
    });
  };

  private onPointerAbort = (): void => {
    if (this.pointerId === null) {
      return;
    }
    this.pointerId = null;
    if (this.exceededDeadzone && this.state.topCard) {
      const card = this.state.topCard;
      void this.runPending(async () => {
        await this.api.gesture(this.sessionId, card.card_id, "drag", this.lastDx, 0);
        const result = await this.api.gesture(this.sessionId, card.card_id, "release", 0, 0);
        this.settleRelease(result, 0);
      });
    }
  };

  private settleRelease(result: GestureResult, dx: number): void {
    if (result.resolution === "swiped") {
      const top = this.topEl();
      if (top) {
        top.classList.add(dx < 0 ? "fly-off-left" : "fly-off-right");
      }
      this.setStack({
        status: result.status ?? "active",
        top: result.top ?? null,
        next: result.next ?? null,
        preloaded_count: result.preloaded_count ?? 0,
      });
    } else {
      // canceled: spring back to rest
      this.state.drag = null;
      this.applyDragVisuals(0);
      this.render();
    }
  }

  private async runPending(action: () => Promise<void>): Promise<void> {
    this.state.pending = true;
    try {
      await action();
    } catch {
      this.freeze();
    } finally {
      this.state.pending = false;
      this.state.drag = null;
    }
  }

  private freeze(): void {
    this.root.classList.add("stack-frozen");
    this.callbacks.onConnectionLost?.();
  }
}
