/** Catalog of interactive controls and the wire action each one issues.
 *
 * Every control in the rendered tree maps 1:1 to a wire action name; the
 * grey ones are plain edits, the blue ones trigger synthesis. A session in
 * the controlNoSynthesis cohort renders none of the blue ones, and its
 * begin control is a plain edit (it only opens the editor).
 */

import type { Cohort } from "./types.js";

export type ControlKind = "edit" | "synthesis";

export const SYNTHESIS_ACTIONS = [
  "begin",
  "autoAddObjectInitial",
  "generateFieldsAndMethods",
  "autoAddObjectFull",
  "autoAddField",
  "autoAddMethod",
] as const;

export const EDIT_ACTIONS = [
  "addObject",
  "renameObject",
  "deleteComponent",
  "restoreComponent",
  "addField",
  "toggleMultiplicity",
  "toggleTwoWay",
  "addMethod",
  "editField",
] as const;

export type WireAction =
  | (typeof SYNTHESIS_ACTIONS)[number]
  | (typeof EDIT_ACTIONS)[number]
  | "finish";

/** control name -> the wire action it issues */
export const CONTROL_ACTIONS: Record<string, WireAction> = {
  begin: "begin",
  autoAddObject: "autoAddObjectInitial",
  generate: "generateFieldsAndMethods",
  autoAddObjectFull: "autoAddObjectFull",
  autoAddField: "autoAddField",
  autoAddMethod: "autoAddMethod",
  addObject: "addObject",
  renameObject: "renameObject",
  deleteObject: "deleteComponent",
  deleteField: "deleteComponent",
  deleteMethod: "deleteComponent",
  restore: "restoreComponent",
  addField: "addField",
  toggleMultiplicity: "toggleMultiplicity",
  toggleTwoWay: "toggleTwoWay",
  addMethod: "addMethod",
  renameField: "editField",
  editFieldType: "editField",
  finish: "finish",
};

export function controlKind(action: WireAction, cohort: Cohort): ControlKind {
  if (action === "begin") {
    // the control arm's begin is a plain phase change, nothing is synthesized
    return cohort === "controlNoSynthesis" ? "edit" : "synthesis";
  }
  return (SYNTHESIS_ACTIONS as readonly string[]).includes(action) ? "synthesis" : "edit";
}
