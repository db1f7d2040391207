/** Extraction-settings panel: load current values, push edits back. */

import { ExtractionConfigDto, StoryExpApi } from "../api";
import { DocumentSession } from "../state";

export class ConfigPanel {
  current: ExtractionConfigDto | null = null;

  constructor(private readonly session: DocumentSession) {}

  private get api(): StoryExpApi {
    return this.session.api;
  }

  async load(): Promise<ExtractionConfigDto> {
    this.current = await this.api.getConfig(this.session.docId);
    return this.current;
  }

  async apply(patch: Partial<ExtractionConfigDto>): Promise<ExtractionConfigDto> {
    const res = await this.session.mutate(() =>
      this.api.patchConfig(this.session.docId, patch),
    );
    this.current = res.config;
    return this.current;
  }
}
