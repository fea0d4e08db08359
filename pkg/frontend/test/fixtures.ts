import goldenJson from "./fixtures/ui_golden.json";

import type { CardPayload, TransformWire, UiConfig } from "../src/types.js";

export interface GoldenFixture {
  config: UiConfig;
  transforms: { dx: number; spec: TransformWire }[];
  card: CardPayload;
  viewport: { side: number; margin: number };
  pixel_vertices: [number, number][];
  pixel_full_pentagon: [number, number][];
}

export const golden = goldenJson as unknown as GoldenFixture;
