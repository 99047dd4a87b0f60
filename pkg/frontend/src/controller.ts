// The playground's state machine.  Every field of `state` is either typed-in
// user input or a verbatim service response; transitions never synthesize
// game state locally, so an illegal action leaves the board exactly as the
// last successful response rendered it.

import { ApiClient, ApiError } from "./api.js";
import type { DomainDoc, JobView, MechanicDoc, SessionView } from "./types.js";

export interface PlaygroundState {
  domainId: string | null;
  domain: DomainDoc | null;
  job: JobView | null;
  mechanics: MechanicDoc[];
  session: SessionView | null;
  flash: string | null; // transient error surfaced verbatim
}

export type Sleep = (ms: number) => Promise<void>;

const realSleep: Sleep = (ms) => new Promise((resolve) => setTimeout(resolve, ms));

export class PlaygroundController {
  state: PlaygroundState = {
    domainId: null,
    domain: null,
    job: null,
    mechanics: [],
    session: null,
    flash: null,
  };

  constructor(
    private readonly api: ApiClient,
    private readonly sleep: Sleep = realSleep,
    private readonly pollIntervalMs = 1000,
  ) {}

  async uploadDomain(document: unknown): Promise<void> {
    const uploaded = await this.api.uploadDomain(document);
    const fetched = await this.api.getDomain(uploaded.id);
    this.state.domainId = uploaded.id;
    this.state.domain = fetched.document;
    this.state.job = null;
    this.state.mechanics = [];
    this.state.session = null;
    this.state.flash = null;
  }

  async startGeneration(): Promise<void> {
    if (!this.state.domainId) throw new Error("upload a domain first");
    this.state.job = await this.api.startGeneration(this.state.domainId);
  }

  async startAdaptation(seed: MechanicDoc[], overlay: unknown): Promise<void> {
    if (!this.state.domainId) throw new Error("upload a domain first");
    this.state.job = await this.api.startAdaptation(this.state.domainId, seed, overlay);
  }

  async pollJobOnce(): Promise<JobView> {
    if (!this.state.job) throw new Error("no job running");
    const job = await this.api.getJob(this.state.job.id);
    this.state.job = job;
    if (job.status === "done" && job.result) {
      this.state.mechanics = job.result.mechanics;
    }
    return job;
  }

  async waitForJob(maxPolls = 600): Promise<JobView> {
    for (let i = 0; i < maxPolls; i += 1) {
      const job = await this.pollJobOnce();
      if (job.status === "done" || job.status === "failed") return job;
      await this.sleep(this.pollIntervalMs);
    }
    throw new Error("generation did not finish");
  }

  async openSession(): Promise<void> {
    if (!this.state.domainId) throw new Error("upload a domain first");
    this.state.session = await this.api.openSession(
      this.state.domainId,
      this.state.mechanics,
    );
    this.state.flash = null;
  }

  /** Take a turn; on an illegal action the board state is left untouched and
   * the service's message becomes the flash. */
  async act(agent: string, action: number | string): Promise<void> {
    if (!this.state.session) throw new Error("no open session");
    try {
      this.state.session = await this.api.act(this.state.session.id, agent, action);
      this.state.flash = null;
    } catch (error) {
      if (error instanceof ApiError) {
        this.state.flash = `${error.code}: ${error.message}`;
        return;
      }
      throw error;
    }
  }

  async reset(): Promise<void> {
    if (!this.state.session) throw new Error("no open session");
    this.state.session = await this.api.reset(this.state.session.id);
    this.state.flash = null;
  }
}
