/** Wire types mirroring the server's published JSON schemas. */

import { z } from "zod";

export interface GraphNodeDoc {
  id: string;
  kind: string;
  params: Record<string, string | number>;
  label: string;
  is_query: boolean;
  is_minimality: boolean;
}

export interface ReasonGraphDoc {
  nodes: GraphNodeDoc[];
  edges: [string, string][];
  root: string[];
}

export interface NoticeDoc {
  case: "optimality";
  message: string;
  f_star: number;
  witness: number[];
  solution?: SolutionDoc;
}

export interface ScheduleRowDoc {
  activity: number;
  start: number;
  completion: number;
  duration: number;
  predecessors: number[];
  resources: number[];
  is_dummy: boolean;
  window: [number, number];
}

export interface AuctionRowDoc {
  bid: number;
  price: number;
  goods: number[];
  selected: boolean;
}

export type SolutionDoc =
  | { kind: "schedule"; rows: ScheduleRowDoc[]; horizon: number }
  | { kind: "auction"; rows: AuctionRowDoc[]; goods: number }
  | { kind: "assignment"; rows: { variable: string; value: number }[] };

export interface ExplainResponse {
  case: "infeasibility" | "optimality" | "suboptimality";
  extended_objective: number | null;
  artifact: string;
  t_iis: number;
  graph?: ReasonGraphDoc;
  iis_report?: {
    algorithm: string;
    constraint_ids: string[];
    tags: string[];
    size: number;
    oracle_calls: number;
    wall_time: number;
  };
  notice?: NoticeDoc;
}

export interface SolveResponse {
  f_star: number;
  sense: "min" | "max";
  status: string;
  solution: SolutionDoc;
}

const int = z.number().int();
const intList = z.array(int).nonempty();

/** Client-side mirror of docs/schemas/query.schema.json: drafts must
 * validate before they are allowed to leave the browser. */
export const querySchema = z.discriminatedUnion("kind", [
  z.object({ kind: z.literal("Q1"), activity: int, time: int }).strict(),
  z.object({ kind: z.literal("Q2"), activity: int, time: int }).strict(),
  z.object({ kind: z.literal("Q3"), activity: int, time: int }).strict(),
  z.object({ kind: z.literal("Q4"), activity: int, time: int }).strict(),
  z.object({ kind: z.literal("Q5"), activities: intList, time: int }).strict(),
  z.object({ kind: z.literal("Q5all"), activities: intList, time: int }).strict(),
  z.object({ kind: z.literal("Q6"), activities: intList, time: int }).strict(),
  z.object({ kind: z.literal("Q7"), activity: int, time: int, time_alt: int }).strict(),
  z.object({ kind: z.literal("Q8"), activity: int, activity_other: int, time: int }).strict(),
  z.object({ kind: z.literal("W1"), bid: int }).strict(),
  z.object({ kind: z.literal("W2"), bid: int }).strict(),
  z.object({ kind: z.literal("W3"), bids: intList }).strict(),
  z.object({ kind: z.literal("W4"), bid: int, bid_other: int }).strict(),
]);

export type QueryDraft = z.infer<typeof querySchema>;
