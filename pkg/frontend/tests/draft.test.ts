import { describe, expect, it } from "vitest";

import { auctionOffer, refineDraft, scheduleOffer, validateDraft, draftIsValid } from "../src/draft.js";
import { offerForCell, solutionTableHtml } from "../src/render.js";
import { querySchema, SolutionDoc } from "../src/types.js";

const SCHEDULE: SolutionDoc = {
  kind: "schedule",
  horizon: 15,
  rows: [
    { activity: 0, start: 0, completion: 0, duration: 0, predecessors: [], resources: [0], is_dummy: true, window: [0, 0] },
    { activity: 16, start: 1, completion: 5, duration: 5, predecessors: [0], resources: [5], is_dummy: false, window: [5, 8] },
    { activity: 24, start: 14, completion: 15, duration: 2, predecessors: [23], resources: [9], is_dummy: false, window: [13, 15] },
  ],
};

const AUCTION: SolutionDoc = {
  kind: "auction",
  goods: 2,
  rows: [
    { bid: 0, price: 5, goods: [0], selected: true },
    { bid: 1, price: 4, goods: [1], selected: true },
    { bid: 2, price: 8, goods: [0, 1], selected: false },
  ],
};

describe("query drafting from solution clicks", () => {
  it("offers veto-style kinds on a realized completion", () => {
    const offer = scheduleOffer({ activity: 24, time: 15, realized: true, realizedTime: 15, window: [13, 15] });
    expect(offer.kinds).toEqual(["Q1", "Q7", "Q8"]);
    expect(offer.draft).toEqual({ kind: "Q1", activity: 24, time: 15 });
    expect(querySchema.safeParse(offer.draft).success).toBe(true);
  });

  it("offers enforce-style kinds on an empty window cell", () => {
    const offer = scheduleOffer({ activity: 24, time: 14, realized: false, realizedTime: 15, window: [13, 15] });
    expect(offer.kinds).toEqual(["Q2", "Q3", "Q4"]);
    expect(offer.draft).toEqual({ kind: "Q2", activity: 24, time: 14 });
    expect(querySchema.safeParse(offer.draft).success).toBe(true);
  });

  it("limits enforce offers at window borders", () => {
    const atEf = scheduleOffer({ activity: 16, time: 5, realized: false, realizedTime: 6, window: [5, 8] });
    expect(atEf.kinds).toEqual(["Q2", "Q4"]); // nothing strictly before ef
    const atLf = scheduleOffer({ activity: 16, time: 8, realized: false, realizedTime: 6, window: [5, 8] });
    expect(atLf.kinds).toEqual(["Q2", "Q3"]);
  });

  it("offers W2 for an unselected bid and W1/W3/W4 for a winner", () => {
    const loser = auctionOffer(AUCTION.rows[2] as never, AUCTION.rows as never);
    expect(loser.kinds).toEqual(["W2"]);
    expect(loser.draft).toEqual({ kind: "W2", bid: 2 });
    const winner = auctionOffer(AUCTION.rows[0] as never, AUCTION.rows as never);
    expect(winner.kinds).toEqual(["W1", "W3", "W4"]);
    expect(winner.draft).toEqual({ kind: "W1", bid: 0 });
  });

  it("refines a base draft into two-parameter kinds", () => {
    const base = validateDraft({ kind: "Q1", activity: 24, time: 15 });
    const q7 = refineDraft(base, "Q7", { time_alt: 13 });
    expect(q7).toEqual({ kind: "Q7", activity: 24, time: 15, time_alt: 13 });
    const q8 = refineDraft(base, "Q8", { activity_other: 16 });
    expect(q8).toEqual({ kind: "Q8", activity: 24, activity_other: 16, time: 15 });
    expect(() => refineDraft(base, "Q7", {})).toThrow(); // missing time_alt
  });

  it("round-trips drafts byte-for-byte modulo field order", () => {
    const draft = validateDraft({ kind: "Q7", activity: 24, time: 15, time_alt: 13 });
    const echoed = JSON.parse(JSON.stringify(draft));
    expect(validateDraft(echoed)).toEqual(draft);
  });

  it("rejects malformed drafts", () => {
    expect(draftIsValid({ kind: "Q1", activity: 24 })).toBe(false); // no time
    expect(draftIsValid({ kind: "Q9", activity: 1, time: 1 })).toBe(false);
    expect(draftIsValid({ kind: "W3", bids: [] })).toBe(false);
  });
});

describe("clicks resolve through the rendered table", () => {
  it("maps a schedule cell reference to the right offer family", () => {
    const realized = offerForCell({ kind: "schedule", activity: 24, time: 15 }, SCHEDULE);
    expect(realized!.kinds).toEqual(["Q1", "Q7", "Q8"]);
    const empty = offerForCell({ kind: "schedule", activity: 24, time: 14 }, SCHEDULE);
    expect(empty!.kinds).toEqual(["Q2", "Q3", "Q4"]);
  });

  it("maps auction rows to offers", () => {
    const offer = offerForCell({ kind: "auction", bid: 2 }, AUCTION);
    expect(offer!.draft).toEqual({ kind: "W2", bid: 2 });
  });

  it("marks clickable cells with data attributes and skips dummies", () => {
    const html = solutionTableHtml(SCHEDULE);
    expect(html).toContain('data-activity="24"');
    expect(html).not.toContain('data-activity="0"'); // dummy source not clickable
    expect(html).toContain('data-realized="true"');
  });
});
