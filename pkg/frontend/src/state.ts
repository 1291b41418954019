/** View state for one explorer tab: a session, its solution view, the
 * query draft under construction, and the append-only list of explanation
 * panels.  One explain call in flight at a time.
 */

import { Client } from "./api.js";
import { QueryDraft, SolutionDoc, ExplainResponse } from "./types.js";
import { buildScene, Scene } from "./scene.js";
import { draftIsValid } from "./draft.js";

export interface Panel {
  index: number;
  query: QueryDraft;
  algorithm: string;
  outcome: string;
  scene: Scene | null; // graph cases
  labels: string[]; // node labels verbatim from the server
  notice: string | null; // optimality case
  witnessSolution: SolutionDoc | null;
  iisSize: number | null;
  raw: ExplainResponse;
}

export class ViewState {
  sessionId: string | null = null;
  family: string | null = null;
  fStar: number | null = null;
  solution: SolutionDoc | null = null;
  draft: QueryDraft | null = null;
  readonly panels: Panel[] = [];
  busy = false;

  constructor(private readonly client: Client) {}

  async load(family: string, content: string, name: string): Promise<void> {
    const created = await this.client.createInstance(family, content, name);
    this.sessionId = created.session_id;
    this.family = family;
    const solved = await this.client.solve(created.session_id);
    this.fStar = solved.f_star;
    this.solution = solved.solution;
  }

  setDraft(draft: QueryDraft | null): void {
    this.draft = draft;
  }

  draftReady(): boolean {
    return this.draft !== null && draftIsValid(this.draft);
  }

  async submitDraft(algorithm: string): Promise<Panel> {
    if (!this.sessionId || !this.draft) throw new Error("no session or draft");
    if (!draftIsValid(this.draft)) throw new Error("draft does not validate");
    if (this.busy) throw new Error("explain already in flight");
    this.busy = true;
    try {
      const response = await this.client.explain(this.sessionId, this.draft, algorithm);
      const panel: Panel = {
        index: this.panels.length,
        query: this.draft,
        algorithm,
        outcome: response.case,
        scene: response.graph ? buildScene(response.graph) : null,
        labels: response.graph ? response.graph.nodes.map((n) => n.label) : [],
        notice: response.notice?.message ?? null,
        witnessSolution: response.notice?.solution ?? null,
        iisSize: response.iis_report?.size ?? null,
        raw: response,
      };
      this.panels.push(panel);
      return panel;
    } finally {
      this.busy = false;
    }
  }
}
