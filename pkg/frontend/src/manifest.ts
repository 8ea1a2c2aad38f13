/** Component manifest files produced by the spec compiler. */

import { readFileSync } from "node:fs";

export type ManifestEvent = {
  name: string;
  trigger: string;
  trigger_args: string[];
  params: string[];
  context_index: number;
};

export type ManifestCallback = { name: string; params: string[] };

export type ComponentManifest = {
  component: string;
  monitor_address: string;
  events: ManifestEvent[];
  systemside_conditions: ManifestCallback[];
  systemside_actions: ManifestCallback[];
  systemside_state: { name: string; kind: string }[];
};

export function loadManifest(path: string): ComponentManifest {
  const obj = JSON.parse(readFileSync(path, "utf-8"));
  if (obj.format !== "polyrv-manifest" || obj.format_version !== 1) {
    throw new Error(`${path} is not a polyrv manifest (format_version 1)`);
  }
  return obj as ComponentManifest;
}

export function eventNamed(manifest: ComponentManifest, name: string): ManifestEvent | undefined {
  return manifest.events.find((e) => e.name === name);
}
