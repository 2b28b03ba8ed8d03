// Grading scheme bounds; must stay in lockstep with the pipeline's
// annotations.csv schema.

export const STRENGTH_LABELS = ["none", "low", "moderate", "strong"] as const;
export const PATTERN_LABELS = ["none", "sparse", "dense"] as const;
export const STRENGTH_MAX = STRENGTH_LABELS.length - 1;
export const PATTERN_MAX = PATTERN_LABELS.length - 1;

export interface Score {
  strength: number;
  pattern: number;
}

/**
 * One tile as the grader is allowed to see it. The sampling manifest's
 * hidden class label is stripped during parsing and never reaches this type.
 */
export interface SessionTile {
  tileId: number;
  imagePath: string;
  order: number;
}

export interface EvaluatorInfo {
  evaluatorId: string;
  weight: number;
}

export interface SavedSession {
  evaluatorId: string;
  weight: number;
  scores: Record<string, Score>;
}
