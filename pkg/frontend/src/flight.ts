// Per-panel request sequencing: each new request supersedes the previous
// one, and a response only lands if it is still the latest (cancel-and-
// replace). The panel is marked busy while a request is in flight so stale
// content is visibly disabled.

export class PanelFlight {
  private seq = 0;

  constructor(private readonly root: HTMLElement) {}

  begin(): number {
    this.seq += 1;
    this.root.classList.add("loading");
    this.root.setAttribute("aria-busy", "true");
    return this.seq;
  }

  /** True (and clears the busy state) only for the latest request. */
  land(token: number): boolean {
    if (token !== this.seq) {
      return false;
    }
    this.root.classList.remove("loading");
    this.root.setAttribute("aria-busy", "false");
    return true;
  }
}
