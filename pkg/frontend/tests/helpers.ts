import { readFileSync } from "node:fs";
import path from "node:path";
import { fileURLToPath } from "node:url";

import { StoryExpApi } from "../src/api";
import { DocumentSession, openDocument } from "../src/state";

const HERE = path.dirname(fileURLToPath(import.meta.url));

export function baseUrl(): string {
  const fromEnv = process.env.STORYEXP_BASE_URL;
  if (fromEnv) return fromEnv;
  const info = JSON.parse(
    readFileSync(path.join(HERE, ".server.json"), "utf-8"),
  ) as { baseUrl: string };
  return info.baseUrl;
}

export function freshApi(): StoryExpApi {
  return new StoryExpApi(baseUrl());
}

let counter = 0;

/** Unique text per call: document ids are content hashes. */
export function uniqueText(body: string): string {
  counter += 1;
  return `${body}\nrun marker ${process.pid} ${Date.now()} ${counter}\n`;
}

export async function openSession(body: string): Promise<DocumentSession> {
  return openDocument(freshApi(), uniqueText(body), "test document");
}

export interface StoryHandles {
  session: DocumentSession;
  persons: Record<string, string>;
  fragments: string[];
}

/**
 * Three persons, three fragments:
 *   f0: Anna+Boris over steps 0..1, f1: Clara at 1..2, f2: Anna+Clara at 3.
 * Small enough to reason about, rich enough for crossings and merges.
 */
export async function storylineFixture(): Promise<StoryHandles> {
  const session = await openSession(
    "Anna met Boris at the harbor. Clara waited inland. Later Anna found Clara.",
  );
  const api = session.api;
  const persons: Record<string, string> = {};
  for (const name of ["Anna", "Boris", "Clara"]) {
    const res = await api.createEntity(session.docId, "person", name);
    persons[name] = res.entity.id;
  }
  const fragments: string[] = [];
  const plans: [string[], number, number][] = [
    [[persons.Anna!, persons.Boris!], 0, 1],
    [[persons.Clara!], 1, 2],
    [[persons.Anna!, persons.Clara!], 3, 3],
  ];
  for (const [members, start, end] of plans) {
    const res = await api.createFragment(session.docId, {
      persons: members,
      eventSummary: "scene",
    });
    await api.patchFragment(session.docId, res.fragment.id, {
      interval: [start, end],
    });
    fragments.push(res.fragment.id);
  }
  await session.refresh();
  return { session, persons, fragments };
}

/** Commit an initial layout so GET /layout and the SVG endpoint answer. */
export async function commitInitialLayout(
  session: DocumentSession,
): Promise<void> {
  const preview = await session.api.previewLayout(session.docId, []);
  await session.api.commitLayout(session.docId, preview.token);
  await session.refresh();
}
