import { describe, expect, it } from "vitest";

import { ManifestError } from "../src/manifest.js";
import { Session } from "../src/session.js";
import { MemoryStore } from "../src/storage.js";
import { makeManifest, scriptedScore } from "./helpers.js";

const EVALUATOR = { evaluatorId: "e1", weight: 3 };

describe("session lifecycle", () => {
  it("starts at index 0 with 0/70 progress on a 70-tile manifest", () => {
    const session = new Session(makeManifest(), EVALUATOR);
    expect(session.total).toBe(70);
    expect(session.scoredCount).toBe(0);
    expect(session.position).toBe(0);
  });

  it("rejects an empty manifest", () => {
    expect(() => new Session({ scheme: {}, tiles: [] }, EVALUATOR)).toThrow(
      ManifestError,
    );
  });

  it("rejects malformed manifests", () => {
    expect(() => new Session("nope", EVALUATOR)).toThrow(ManifestError);
    expect(
      () => new Session({ tiles: [{ tile_id: 0.5, image_path: "x", order: 0 }] },
                        EVALUATOR),
    ).toThrow(ManifestError);
    expect(
      () =>
        new Session(
          {
            tiles: [
              { tile_id: 0, image_path: "a.png", order: 0 },
              { tile_id: 1, image_path: "b.png", order: 0 },
            ],
          },
          EVALUATOR,
        ),
    ).toThrow(/order/);
  });

  it("presents tiles exactly in manifest order", () => {
    const manifest = makeManifest();
    const session = new Session(manifest, EVALUATOR);
    const expected = [...manifest.tiles]
      .sort((a, b) => a.order - b.order)
      .map((t) => t.tile_id);
    const seen: number[] = [];
    for (let i = 0; i < session.total; i++) {
      seen.push(session.current().tileId);
      session.recordScore(0, 0);
    }
    expect(seen).toEqual(expected);
  });

  it("advances after a score and clamps at the last tile", () => {
    const session = new Session(makeManifest(2, 2), EVALUATOR);
    session.recordScore(3, 2);
    expect(session.position).toBe(1);
    session.recordScore(1, 1);
    session.recordScore(0, 0);
    session.recordScore(2, 2);
    expect(session.position).toBe(3);
    expect(session.isComplete()).toBe(true);
  });

  it("blocks forward movement over an unscored tile", () => {
    const session = new Session(makeManifest(2, 2), EVALUATOR);
    expect(session.forward()).toBe(false);
    expect(session.position).toBe(0);
    session.recordScore(1, 0);
    session.back();
    expect(session.forward()).toBe(true);
    expect(session.position).toBe(1);
  });

  it("lets revisits overwrite, last write wins", () => {
    const session = new Session(makeManifest(2, 2), EVALUATOR);
    const first = session.current().tileId;
    session.recordScore(3, 2);
    session.back();
    expect(session.current().tileId).toBe(first);
    session.recordScore(1, 0);
    expect(session.scoreOf(first)).toEqual({ strength: 1, pattern: 0 });
  });

  it("rejects out-of-range scores", () => {
    const session = new Session(makeManifest(2, 2), EVALUATOR);
    expect(() => session.recordScore(4, 0)).toThrow(RangeError);
    expect(() => session.recordScore(0, 3)).toThrow(RangeError);
    expect(() => session.recordScore(1.5, 0)).toThrow(RangeError);
  });
});

describe("autosave and resume", () => {
  it("resumes a partial session at the first unscored tile", () => {
    const store = new MemoryStore();
    const manifest = makeManifest();
    const a = new Session(manifest, EVALUATOR, store);
    for (let i = 0; i < 25; i++) a.recordScore(scriptedScore(a.current().tileId).strength,
                                               scriptedScore(a.current().tileId).pattern);
    const b = new Session(manifest, EVALUATOR, store);
    expect(b.scoredCount).toBe(25);
    expect(b.position).toBe(25);
    expect(b.current().tileId).toBe(a.current().tileId);
  });

  it("ignores saved state from a different evaluator", () => {
    const store = new MemoryStore();
    const manifest = makeManifest(2, 2);
    const a = new Session(manifest, EVALUATOR, store);
    a.recordScore(2, 1);
    const b = new Session(manifest, { evaluatorId: "e2", weight: 1 }, store);
    expect(b.scoredCount).toBe(0);
  });

  it("saves after every score", () => {
    const store = new MemoryStore();
    const session = new Session(makeManifest(2, 2), EVALUATOR, store);
    session.recordScore(1, 1);
    expect(Object.keys(store.load()!.scores)).toHaveLength(1);
    session.recordScore(2, 0);
    expect(Object.keys(store.load()!.scores)).toHaveLength(2);
  });
});
