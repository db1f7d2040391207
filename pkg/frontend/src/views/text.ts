/**
 * Text view: freehand ink over a page becomes annotations.
 *
 * Strokes are captured locally, trimmed to the wire budget, and posted
 * as one gesture. An underline comes back with ranked entity candidates;
 * the view surfaces them in a popover and only creates an entity once
 * the user confirms a kind and name.
 */

import {
  AnnotationResponseDto,
  CandidateDto,
  EntityDto,
  EntityKindDto,
  TextSpanDto,
} from "../api";
import { buildInkPayload, InkSample } from "../ink";
import { DocumentSession, ViewState } from "../state";

export const ENTITY_KIND_CHOICES: readonly EntityKindDto[] = [
  "person",
  "time",
  "place",
  "event",
];

export interface CandidatePopover {
  choices: readonly EntityKindDto[];
  candidates: CandidateDto[];
  spans: TextSpanDto[];
}

export class TextView {
  popover: CandidatePopover | null = null;
  lastResponse: AnnotationResponseDto | null = null;

  constructor(
    private readonly session: DocumentSession,
    private readonly view: ViewState,
  ) {}

  /**
   * Post the captured strokes as one annotation gesture.
   * Returns null without touching the network when the ink collapses
   * to a tap or has no real stroke.
   */
  async submitInk(
    strokes: InkSample[][],
    pageIndex: number,
  ): Promise<AnnotationResponseDto | null> {
    const payload = buildInkPayload(strokes, pageIndex, this.view.activeTool);
    if (payload === null) return null;

    const response = await this.session.mutate(() =>
      this.session.api.postAnnotation(this.session.docId, payload),
    );
    this.lastResponse = response;

    if (response.gesture === "underline" && this.view.activeTool === "Select") {
      this.popover = {
        choices: ENTITY_KIND_CHOICES,
        candidates: response.candidates ?? [],
        spans: response.spans,
      };
    }
    return response;
  }

  /** User picked a kind (and possibly edited the name) in the popover. */
  async confirmCandidate(kind: EntityKindDto, name: string): Promise<EntityDto> {
    if (this.popover === null) {
      throw new Error("no candidate popover is open");
    }
    const res = await this.session.mutate(() =>
      this.session.api.createEntity(this.session.docId, kind, name),
    );
    this.popover = null;
    return res.entity;
  }

  dismissPopover(): void {
    this.popover = null;
  }
}
