/**
 * Storyline canvas: the committed layout plus an optional preview overlay.
 *
 * Dragging a fragment block onto another step never edits the document
 * directly. It requests a shadow layout, renders that as an overlay, and
 * only a confirm commits the edit and the previewed geometry in one shot.
 * The legend filter and camera are pure client state; toggling a person
 * hides their line locally without invalidating anything server-side.
 */

import {
  ApiError,
  ConflictDto,
  EditOpDto,
  LayoutDto,
  LayoutLineDto,
  PreviewResponseDto,
} from "../api";
import { DocumentSession, ViewState } from "../state";

export interface PreviewOverlay {
  token: string;
  baseDocVersion: number;
  layout: LayoutDto;
  metrics: LayoutDto["metrics"];
  edits: EditOpDto[];
}

export class StorylineView {
  overlay: PreviewOverlay | null = null;
  conflictMarkers: ConflictDto[] = [];
  /** set when a commit lost the race against a newer document version */
  staleCommit = false;

  constructor(
    private readonly session: DocumentSession,
    private readonly view: ViewState,
  ) {}

  get committedLayout(): LayoutDto | null {
    return this.session.layout;
  }

  /**
   * Drag handler: the dragged fragment takes over the target interval.
   * Dropping onto another fragment's step makes the two co-temporal.
   */
  async dropOnStep(
    fragmentId: string,
    start: number,
    end: number,
  ): Promise<PreviewOverlay | null> {
    const edits: EditOpDto[] = [{ op: "setInterval", fragmentId, start, end }];
    return this.requestPreview(edits);
  }

  async requestPreview(edits: EditOpDto[]): Promise<PreviewOverlay | null> {
    this.conflictMarkers = [];
    let res: PreviewResponseDto;
    try {
      res = await this.session.api.previewLayout(this.session.docId, edits);
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.conflictMarkers = err.conflicts ?? [];
        this.overlay = null;
        this.view.pendingPreviewToken = null;
        return null;
      }
      throw err;
    }
    this.overlay = {
      token: res.token,
      baseDocVersion: res.baseDocVersion,
      layout: res.layout,
      metrics: res.metrics,
      edits,
    };
    this.view.pendingPreviewToken = res.token;
    return this.overlay;
  }

  /** Commit the overlay. The token is single-use either way. */
  async confirmDrop(): Promise<LayoutDto> {
    if (this.overlay === null) throw new Error("no preview to commit");
    const token = this.overlay.token;
    this.clearOverlay();
    try {
      const res = await this.session.api.commitLayout(this.session.docId, token);
      await this.session.refresh();
      return res.layout;
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.staleCommit = true;
        await this.session.refresh();
      }
      throw err;
    }
  }

  /** Drop the overlay without committing; the document is untouched. */
  cancelDrop(): void {
    this.clearOverlay();
  }

  private clearOverlay(): void {
    this.overlay = null;
    this.conflictMarkers = [];
    this.view.pendingPreviewToken = null;
  }

  // -- legend and camera: client-only state ---------------------------------

  toggleLegend(entityId: string): void {
    this.view.togglePerson(entityId);
  }

  visibleLines(): LayoutLineDto[] {
    const layout = this.overlay?.layout ?? this.session.layout;
    if (!layout) return [];
    return layout.lines.filter(
      (line) => !this.view.hiddenPersons.has(line.entityId),
    );
  }

  panMinimap(dx: number, dy: number): void {
    this.view.panBy(dx, dy);
  }

  zoomAt(factor: number, cx: number, cy: number): void {
    this.view.zoomBy(factor, cx, cy);
  }
}
