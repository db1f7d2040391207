/**
 * Fragment cards: keyword chips and the editable event summary.
 *
 * Every edit round-trips through the server; a 409 means someone else
 * moved the document forward, so the card flags itself for a reload
 * instead of clobbering newer state.
 */

import { ApiError, FragmentDto, StoryExpApi, WeightedTermDto } from "../api";
import { DocumentSession } from "../state";

type FragmentPatch = Parameters<StoryExpApi["patchFragment"]>[2];

export class FragmentCard {
  retryPrompt = false;

  constructor(
    private readonly session: DocumentSession,
    readonly fragmentId: string,
  ) {}

  get fragment(): FragmentDto {
    const found = this.session.fragments.find((f) => f.id === this.fragmentId);
    if (!found) throw new Error(`fragment ${this.fragmentId} not in document`);
    return found;
  }

  /** Add the term if absent, drop it if present. */
  async toggleKeyword(term: string): Promise<FragmentDto> {
    const current = this.fragment.keywords;
    const next = current.includes(term)
      ? current.filter((k) => k !== term)
      : [...current, term];
    return this.patch({ keywords: next });
  }

  async editSummary(text: string): Promise<FragmentDto> {
    return this.patch({ eventSummary: text });
  }

  async suggestedKeywords(): Promise<WeightedTermDto[]> {
    const res = await this.session.api.fragmentKeywords(
      this.session.docId,
      this.fragmentId,
    );
    return res.terms;
  }

  private async patch(body: FragmentPatch): Promise<FragmentDto> {
    try {
      const res = await this.session.mutate(() =>
        this.session.api.patchFragment(this.session.docId, this.fragmentId, body),
      );
      return res.fragment;
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.retryPrompt = true;
        await this.session.refresh();
      }
      throw err;
    }
  }
}
