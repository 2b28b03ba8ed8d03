import { Session } from "./session.js";

export class IncompleteSessionError extends Error {}

export const CSV_HEADER = "evaluator_id,weight,tile_id,strength,pattern";

function csvField(value: string): string {
  return /[",\n]/.test(value) ? `"${value.replace(/"/g, '""')}"` : value;
}

/**
 * annotations.csv for the aggregation stage: one row per scored tile, in
 * presentation order. A partial session exports only with explicit consent.
 */
export function exportCsv(
  session: Session,
  opts: { allowPartial?: boolean } = {},
): string {
  if (!session.isComplete() && !opts.allowPartial) {
    throw new IncompleteSessionError(
      `${session.scoredCount} of ${session.total} tiles scored`,
    );
  }
  const lines = [CSV_HEADER];
  for (const tile of session.tiles) {
    const score = session.scoreOf(tile.tileId);
    if (!score) continue;
    lines.push(
      [
        csvField(session.evaluatorId),
        String(session.weight),
        String(tile.tileId),
        String(score.strength),
        String(score.pattern),
      ].join(","),
    );
  }
  return lines.join("\n") + "\n";
}
