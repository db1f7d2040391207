/**
 * Typed client for the storyexp session service.
 *
 * Every mutation goes through the HTTP API; the client never edits
 * documents locally. Server errors become ApiError with the service's
 * error name, detail string, and any conflict payload attached.
 */

export interface TextSpanDto {
  pageIndex: number;
  start: number;
  end: number;
}

export type EntityKindDto = "person" | "time" | "place" | "event";

export interface EntityDto {
  id: string;
  kind: EntityKindDto;
  canonicalName: string;
  aliases: string[];
  colorKey: number;
  source: string;
  confidence: number;
}

export interface FragmentDto {
  id: string;
  persons: string[];
  time: string | null;
  place: string | null;
  eventSummary: string;
  keywords: string[];
  spanRange: TextSpanDto[];
  pageRange: [number, number];
  interval: [number, number];
  invalid: boolean;
}

export interface CandidateDto {
  surface: string;
  kind: EntityKindDto;
  confidence: number;
  sourceSpan: TextSpanDto | null;
}

export interface DocumentSummaryDto {
  id: string;
  title: string;
  pages: string[];
  version: number;
}

export interface MonospaceMetricsDto {
  maxChars?: number;
  charWidth?: number;
  lineHeight?: number;
  ascent?: number;
}

export interface AnnotationRequestDto {
  pageIndex: number;
  timeMs: number;
  strokes: number[][][];
  tool?: string;
  pageLayout?: { monospace: MonospaceMetricsDto };
}

export interface AnnotationResponseDto {
  annotationId: string | null;
  gesture: string;
  score: number;
  spans: TextSpanDto[];
  version: number;
  candidates?: CandidateDto[];
  entities?: EntityDto[];
  deleted?: string | null;
  invalidatedFragments?: string[];
  target?: EntityDto | null;
}

export interface LayoutSegmentDto {
  step: number;
  y: number;
}

export interface LayoutLineDto {
  entityId: string;
  segments: LayoutSegmentDto[];
}

export interface LayoutBlockDto {
  fragmentId: string;
  x0: number;
  x1: number;
  y0: number;
  y1: number;
  members: string[];
  keywords: string[];
}

export interface LayoutDto {
  steps: { index: number; sourceSteps: number[] }[];
  lines: LayoutLineDto[];
  blocks: LayoutBlockDto[];
  metrics: { crossings: number; wiggles: number; whitespace: number };
  flags: string[];
  sessions: unknown;
}

export interface ConflictDto {
  entityId: string;
  step: number;
  fragmentA: string;
  fragmentB: string;
}

export type EditOpDto =
  | { op: "setInterval"; fragmentId: string; start: number; end: number }
  | { op: "setKeywords"; fragmentId: string; keywords: string[] }
  | { op: "setSummary"; fragmentId: string; text: string }
  | { op: "merge"; a: string; b: string }
  | { op: "delete"; fragmentId: string };

export interface PreviewResponseDto {
  token: string;
  baseDocVersion: number;
  layout: LayoutDto;
  metrics: LayoutDto["metrics"];
}

export interface WeightedTermDto {
  term: string;
  weight: number;
}

export interface ExtractionConfigDto {
  providerKind: string;
  trustThreshold: number;
  maxIterations: number;
  summarySentenceBudget: number;
  gazetteerConfidence: number;
  patternConfidence: number;
  keywordLevelMultipliers: number[];
  keywordLimit: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly errorName: string,
    readonly detail: string,
    readonly conflicts: ConflictDto[] = [],
  ) {
    super(`${errorName} (${status}): ${detail}`);
  }
}

async function fail(res: Response): Promise<never> {
  let name = "HttpError";
  let detail = res.statusText;
  let conflicts: ConflictDto[] = [];
  try {
    const body = (await res.json()) as Record<string, unknown>;
    if (typeof body.error === "string") name = body.error;
    if (typeof body.detail === "string") detail = body.detail;
    if (Array.isArray(body.conflicts)) conflicts = body.conflicts as ConflictDto[];
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(res.status, name, detail, conflicts);
}

export class StoryExpApi {
  constructor(readonly baseUrl: string) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const res = await fetch(`${this.baseUrl}${path}`, {
      method,
      headers: body !== undefined ? { "content-type": "application/json" } : {},
      body: body !== undefined ? JSON.stringify(body) : undefined,
    });
    if (!res.ok) await fail(res);
    return (await res.json()) as T;
  }

  // documents

  createDocument(text: string, title = ""): Promise<DocumentSummaryDto> {
    return this.request("POST", "/documents", { text, title });
  }

  listDocuments(): Promise<{ documents: string[] }> {
    return this.request("GET", "/documents");
  }

  getDocument(docId: string): Promise<Record<string, unknown>> {
    return this.request("GET", `/documents/${docId}`);
  }

  // annotations

  postAnnotation(
    docId: string,
    payload: AnnotationRequestDto,
  ): Promise<AnnotationResponseDto> {
    return this.request("POST", `/documents/${docId}/annotations`, payload);
  }

  // entities

  createEntity(
    docId: string,
    kind: EntityKindDto,
    name: string,
    extra: { aliases?: string[]; confidence?: number } = {},
  ): Promise<{ entity: EntityDto; version: number }> {
    return this.request("POST", `/documents/${docId}/entities`, {
      kind,
      name,
      ...extra,
    });
  }

  listEntities(docId: string): Promise<{ entities: EntityDto[] }> {
    return this.request("GET", `/documents/${docId}/entities`);
  }

  renameEntity(
    docId: string,
    entityId: string,
    name: string,
  ): Promise<{ entity: EntityDto; version: number }> {
    return this.request("PATCH", `/documents/${docId}/entities/${entityId}`, {
      name,
    });
  }

  deleteEntity(
    docId: string,
    entityId: string,
  ): Promise<{ invalidatedFragments: string[]; version: number }> {
    return this.request("DELETE", `/documents/${docId}/entities/${entityId}`);
  }

  // fragments

  createFragment(
    docId: string,
    body: {
      persons: string[];
      time?: string | null;
      place?: string | null;
      eventSummary?: string;
      spans?: TextSpanDto[];
    },
  ): Promise<{ fragment: FragmentDto; version: number }> {
    return this.request("POST", `/documents/${docId}/fragments`, body);
  }

  listFragments(docId: string): Promise<{ fragments: FragmentDto[] }> {
    return this.request("GET", `/documents/${docId}/fragments`);
  }

  patchFragment(
    docId: string,
    fragmentId: string,
    body: Partial<{
      interval: [number, number];
      persons: string[];
      keywords: string[];
      eventSummary: string;
      time: string | null;
      place: string | null;
    }>,
  ): Promise<{ fragment: FragmentDto; version: number }> {
    return this.request(
      "PATCH",
      `/documents/${docId}/fragments/${fragmentId}`,
      body,
    );
  }

  deleteFragment(
    docId: string,
    fragmentId: string,
  ): Promise<{ version: number }> {
    return this.request(
      "DELETE",
      `/documents/${docId}/fragments/${fragmentId}`,
    );
  }

  // extraction

  extract(
    docId: string,
    pageIndex?: number,
  ): Promise<{ candidates: CandidateDto[] }> {
    return this.request(
      "POST",
      `/documents/${docId}/extract`,
      pageIndex === undefined ? {} : { pageIndex },
    );
  }

  summarizeFragment(
    docId: string,
    fragmentId: string,
  ): Promise<{ summary: string; version: number }> {
    return this.request(
      "POST",
      `/documents/${docId}/fragments/${fragmentId}/summarize`,
    );
  }

  fragmentKeywords(
    docId: string,
    fragmentId: string,
  ): Promise<{ terms: WeightedTermDto[] }> {
    return this.request(
      "GET",
      `/documents/${docId}/fragments/${fragmentId}/keywords`,
    );
  }

  // config

  getConfig(docId: string): Promise<ExtractionConfigDto> {
    return this.request("GET", `/documents/${docId}/config`);
  }

  patchConfig(
    docId: string,
    body: Partial<Record<keyof ExtractionConfigDto, unknown>>,
  ): Promise<{ config: ExtractionConfigDto; version: number }> {
    return this.request("PATCH", `/documents/${docId}/config`, body);
  }

  // layout

  previewLayout(
    docId: string,
    edits: EditOpDto[],
    params: Record<string, string | number> = {},
  ): Promise<PreviewResponseDto> {
    return this.request("POST", `/documents/${docId}/layout/preview`, {
      edits,
      params,
    });
  }

  commitLayout(
    docId: string,
    token: string,
  ): Promise<{ version: number; layout: LayoutDto }> {
    return this.request("POST", `/documents/${docId}/layout/commit`, {
      token,
    });
  }

  getLayout(
    docId: string,
  ): Promise<{ layout: LayoutDto; version: number; stale: boolean }> {
    return this.request("GET", `/documents/${docId}/layout`);
  }

  async getStorylineSvg(docId: string): Promise<string> {
    const res = await fetch(`${this.baseUrl}/documents/${docId}/storyline.svg`);
    if (!res.ok) await fail(res);
    return res.text();
  }
}
