/**
 * Client view state and the document session it operates on.
 *
 * The session owns the latest server snapshot (document, layout, config)
 * and refreshes it after every confirmed mutation: client state is
 * always a fresh GET away from provable equality with the server.
 */

import {
  ApiError,
  ExtractionConfigDto,
  FragmentDto,
  LayoutDto,
  StoryExpApi,
} from "./api";

export type Tool = "Highlight" | "Select" | "Modify" | "Delete";

export interface Camera {
  scale: number;
  tx: number;
  ty: number;
}

const MIN_SCALE = 0.05;
const MAX_SCALE = 40;

export class ViewState {
  private tool: Tool = "Select";
  camera: Camera = { scale: 1, tx: 0, ty: 0 };
  readonly hiddenPersons = new Set<string>();
  pendingPreviewToken: string | null = null;

  get activeTool(): Tool {
    return this.tool;
  }

  setTool(tool: Tool): void {
    this.tool = tool;
  }

  zoomBy(factor: number, cx = 0, cy = 0): void {
    if (!(factor > 0)) throw new RangeError("zoom factor must be positive");
    const next = Math.min(MAX_SCALE, Math.max(MIN_SCALE, this.camera.scale * factor));
    const applied = next / this.camera.scale;
    // keep the (cx, cy) scene point fixed under the cursor
    this.camera = {
      scale: next,
      tx: cx - (cx - this.camera.tx) * applied,
      ty: cy - (cy - this.camera.ty) * applied,
    };
  }

  panBy(dx: number, dy: number): void {
    this.camera = {
      ...this.camera,
      tx: this.camera.tx + dx,
      ty: this.camera.ty + dy,
    };
  }

  togglePerson(entityId: string): void {
    if (this.hiddenPersons.has(entityId)) this.hiddenPersons.delete(entityId);
    else this.hiddenPersons.add(entityId);
  }
}

export class DocumentSession {
  document: Record<string, unknown> | null = null;
  layout: LayoutDto | null = null;
  layoutStale = false;
  config: ExtractionConfigDto | null = null;
  /** set when the server rejected a commit as stale; UI offers retry */
  staleRetryNeeded = false;

  constructor(
    readonly api: StoryExpApi,
    readonly docId: string,
  ) {}

  get version(): number {
    return (this.document?.version as number | undefined) ?? 0;
  }

  get fragments(): FragmentDto[] {
    return (this.document?.fragments as FragmentDto[] | undefined) ?? [];
  }

  get pages(): string[] {
    return (this.document?.pages as string[] | undefined) ?? [];
  }

  async refresh(): Promise<void> {
    this.document = await this.api.getDocument(this.docId);
    this.config = await this.api.getConfig(this.docId);
    try {
      const res = await this.api.getLayout(this.docId);
      this.layout = res.layout;
      this.layoutStale = res.stale;
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.layout = null; // nothing committed yet
        this.layoutStale = false;
      } else {
        throw err;
      }
    }
  }

  /** Run a mutation, then pull the authoritative state back down. */
  async mutate<T>(action: () => Promise<T>): Promise<T> {
    try {
      const out = await action();
      await this.refresh();
      return out;
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.staleRetryNeeded = true;
      }
      throw err;
    }
  }
}

export async function openDocument(
  api: StoryExpApi,
  text: string,
  title = "",
): Promise<DocumentSession> {
  const summary = await api.createDocument(text, title);
  const session = new DocumentSession(api, summary.id);
  await session.refresh();
  return session;
}
