/** Query drafting from solution-table clicks.
 *
 * The split follows the did/did-not-occur distinction: clicking an
 * assignment the optimum realized offers veto-style kinds (Q1/Q7/Q8,
 * W1/W3/W4); clicking an empty cell offers enforce-style kinds (Q2/Q3/Q4,
 * W2).  The returned draft is the first kind that is fully determined by
 * the click alone; the rest need one more user choice (a partner time or
 * activity) and are listed as offers.
 */

import { AuctionRowDoc, QueryDraft, querySchema } from "./types.js";

export interface ScheduleCellClick {
  activity: number;
  time: number;
  realized: boolean; // the activity completes at `time` in the optimum
  realizedTime: number; // where it actually completes
  window: [number, number];
}

export interface DraftOffer {
  kinds: string[];
  draft: QueryDraft;
}

export function scheduleOffer(cell: ScheduleCellClick): DraftOffer {
  if (cell.realized) {
    return {
      kinds: ["Q1", "Q7", "Q8"],
      draft: { kind: "Q1", activity: cell.activity, time: cell.time },
    };
  }
  const kinds = ["Q2"];
  if (cell.time > cell.window[0]) kinds.push("Q3");
  if (cell.time < cell.window[1]) kinds.push("Q4");
  return {
    kinds,
    draft: { kind: "Q2", activity: cell.activity, time: cell.time },
  };
}

export function auctionOffer(row: AuctionRowDoc, partners: AuctionRowDoc[]): DraftOffer {
  if (row.selected) {
    const kinds = ["W1", "W3"];
    if (partners.some((p) => !p.selected)) kinds.push("W4");
    return { kinds, draft: { kind: "W1", bid: row.bid } };
  }
  return { kinds: ["W2"], draft: { kind: "W2", bid: row.bid } };
}

/** Upgrade a base draft to a kind that needs an extra parameter. */
export function refineDraft(
  base: QueryDraft,
  kind: string,
  extra: { time_alt?: number; activity_other?: number; bid_other?: number },
): QueryDraft {
  const candidate: Record<string, unknown> = { ...base, ...extra, kind };
  if (kind === "Q1" || kind === "Q2" || kind === "Q3" || kind === "Q4") {
    delete candidate.time_alt;
    delete candidate.activity_other;
  }
  if (kind === "Q7") delete candidate.activity_other;
  if (kind === "Q8") delete candidate.time_alt;
  if (kind === "W1" || kind === "W2") delete candidate.bid_other;
  return validateDraft(candidate);
}

export function validateDraft(candidate: unknown): QueryDraft {
  return querySchema.parse(candidate);
}

export function draftIsValid(candidate: unknown): boolean {
  return querySchema.safeParse(candidate).success;
}
