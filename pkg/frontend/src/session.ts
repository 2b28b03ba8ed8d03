import { parseManifest } from "./manifest.js";
import { SessionStore } from "./storage.js";
import {
  EvaluatorInfo,
  PATTERN_MAX,
  SavedSession,
  Score,
  SessionTile,
  STRENGTH_MAX,
} from "./types.js";

/**
 * One evaluator's pass over the sampled tiles.
 *
 * Tiles are presented in the manifest's shuffled order. Scores are stored
 * per tile and autosaved after every change; reopening a partially scored
 * session resumes at the first unscored tile. Revisiting is allowed and the
 * last score wins.
 */
export class Session {
  readonly evaluatorId: string;
  readonly weight: number;
  readonly tiles: readonly SessionTile[];

  private scores = new Map<number, Score>();
  private index = 0;

  constructor(
    manifestData: unknown,
    evaluator: EvaluatorInfo,
    private readonly store?: SessionStore,
  ) {
    if (!evaluator.evaluatorId) throw new Error("evaluator id is required");
    if (!(evaluator.weight > 0)) throw new Error("weight must be positive");
    this.evaluatorId = evaluator.evaluatorId;
    this.weight = evaluator.weight;
    this.tiles = parseManifest(manifestData);

    const saved = store?.load();
    if (saved && saved.evaluatorId === this.evaluatorId) {
      const known = new Set(this.tiles.map((t) => t.tileId));
      for (const [key, score] of Object.entries(saved.scores)) {
        const tileId = Number(key);
        if (known.has(tileId) && this.isValidScore(score)) {
          this.scores.set(tileId, score);
        }
      }
    }
    this.index = this.firstUnscoredIndex();
  }

  private isValidScore(score: Score): boolean {
    return (
      Number.isInteger(score.strength) &&
      Number.isInteger(score.pattern) &&
      score.strength >= 0 &&
      score.strength <= STRENGTH_MAX &&
      score.pattern >= 0 &&
      score.pattern <= PATTERN_MAX
    );
  }

  current(): SessionTile {
    const tile = this.tiles[this.index];
    if (!tile) throw new Error(`bad session index ${this.index}`);
    return tile;
  }

  get position(): number {
    return this.index;
  }

  get total(): number {
    return this.tiles.length;
  }

  get scoredCount(): number {
    return this.scores.size;
  }

  isComplete(): boolean {
    return this.scores.size === this.tiles.length;
  }

  scoreOf(tileId: number): Score | undefined {
    return this.scores.get(tileId);
  }

  firstUnscoredIndex(): number {
    const i = this.tiles.findIndex((t) => !this.scores.has(t.tileId));
    return i === -1 ? this.tiles.length - 1 : i;
  }

  /** Store both axes for the current tile, autosave, and advance. */
  recordScore(strength: number, pattern: number): void {
    const score = { strength, pattern };
    if (!this.isValidScore(score)) {
      throw new RangeError(`score out of range: ${strength}/${pattern}`);
    }
    this.scores.set(this.current().tileId, score);
    this.persist();
    if (this.index < this.tiles.length - 1) {
      this.index += 1;
    }
  }

  /** Move forward past an already-scored tile; refused while it is unscored. */
  forward(): boolean {
    if (!this.scores.has(this.current().tileId)) return false;
    if (this.index < this.tiles.length - 1) this.index += 1;
    return true;
  }

  back(): void {
    if (this.index > 0) this.index -= 1;
  }

  goTo(index: number): void {
    if (index < 0 || index >= this.tiles.length) {
      throw new RangeError(`index ${index} outside [0, ${this.tiles.length})`);
    }
    this.index = index;
  }

  toSaved(): SavedSession {
    const scores: Record<string, Score> = {};
    for (const [tileId, score] of this.scores) scores[String(tileId)] = score;
    return { evaluatorId: this.evaluatorId, weight: this.weight, scores };
  }

  private persist(): void {
    this.store?.save(this.toSaved());
  }
}
