/** Wire types for the session service HTTP+JSON API. */

export type Phase = "drafting_names" | "full_model" | "finished";
export type Cohort = "full" | "controlNoSynthesis";
export type Multiplicity = "one" | "many";
export type Provenance = "synthesized" | "user_added";

export const PRIMITIVES = ["int", "float", "string", "boolean", "datetime"] as const;
export type Primitive = (typeof PRIMITIVES)[number];

export type FieldTypeDoc =
  | { kind: "primitive"; primitive: string }
  | { kind: "object"; target: string };

export interface MethodDoc {
  name: string;
  deleted: boolean;
  provenance: Provenance;
}

export interface FieldDoc {
  name: string;
  type: FieldTypeDoc;
  multiplicity: Multiplicity;
  deleted: boolean;
  provenance: Provenance;
  reverseOf?: { object: string; field: string };
}

export interface ObjectDoc {
  name: string;
  deleted: boolean;
  provenance: Provenance;
  fields: FieldDoc[];
  methods: MethodDoc[];
}

export interface ModelDoc {
  prompt: string;
  phase: Phase;
  objects: ObjectDoc[];
}

export interface Diagnostic {
  code: string;
  message: string;
}

/** One component the last action added: object, field, or method. */
export interface AdditionDoc {
  kind: string;
  object: string | null;
  name: string | null;
}

export interface DeltaDoc {
  action: string;
  additions: AdditionDoc[];
  diagnostics: Diagnostic[];
  exchanges: unknown[];
}

export interface SessionView {
  id: string;
  prompt: string;
  cohort: Cohort;
  phase: Phase;
  finished: boolean;
  createdAtMs: number;
  finishedAtMs: number | null;
  componentCount: number;
  model: ModelDoc;
  diagnostics: Diagnostic[];
  delta?: DeltaDoc;
}

export interface ErrorEnvelope {
  error: { code: string; message: string };
}

export function activeObjects(model: ModelDoc): ObjectDoc[] {
  return model.objects.filter((o) => !o.deleted);
}

export function typeLabel(t: FieldTypeDoc): string {
  return t.kind === "primitive" ? t.primitive : t.target;
}
