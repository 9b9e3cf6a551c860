/** Pure renderer: UiState in, plain-data node tree out.
 *
 * Interactive elements carry data-control/data-action attributes plus the
 * arguments the action needs (data-object, data-field, ...). The dom layer
 * reads those attributes back on activation, so the tree is the complete
 * wiring: no hidden listeners, and equal states render equal trees.
 */

import { CONTROL_ACTIONS, controlKind, type WireAction } from "./controls.js";
import type { UiState } from "./viewmodel.js";
import {
  activeObjects,
  PRIMITIVES,
  typeLabel,
  type AdditionDoc,
  type Cohort,
  type FieldTypeDoc,
  type ModelDoc,
  type ObjectDoc,
  type SessionView,
} from "./types.js";

export type VChild = VNode | string;

export interface VNode {
  tag: string;
  attrs: Record<string, string | true>;
  children: VChild[];
}

export function h(
  tag: string,
  attrs: Record<string, string | true> = {},
  ...children: (VChild | VChild[] | null | undefined)[]
): VNode {
  const flat: VChild[] = [];
  for (const c of children) {
    if (c === null || c === undefined) continue;
    if (Array.isArray(c)) flat.push(...c);
    else flat.push(c);
  }
  return { tag, attrs, children: flat };
}

export function collect(node: VNode, pred: (n: VNode) => boolean): VNode[] {
  const out: VNode[] = [];
  const walk = (n: VNode) => {
    if (pred(n)) out.push(n);
    for (const c of n.children) if (typeof c !== "string") walk(c);
  };
  walk(node);
  return out;
}

const ESCAPES: Record<string, string> = {
  "&": "&amp;",
  "<": "&lt;",
  ">": "&gt;",
  '"': "&quot;",
};

function escapeHtml(text: string): string {
  return text.replace(/[&<>"]/g, (ch) => ESCAPES[ch] ?? ch);
}

const VOID_TAGS = new Set(["input", "br", "hr", "img"]);

/** Deterministic serialization (sorted attributes) for equality checks. */
export function renderToHtml(node: VNode): string {
  const attrs = Object.keys(node.attrs)
    .sort()
    .map((k) => {
      const v = node.attrs[k];
      return v === true ? ` ${k}` : ` ${k}="${escapeHtml(String(v))}"`;
    })
    .join("");
  if (VOID_TAGS.has(node.tag)) return `<${node.tag}${attrs}>`;
  const inner = node.children
    .map((c) => (typeof c === "string" ? escapeHtml(c) : renderToHtml(c)))
    .join("");
  return `<${node.tag}${attrs}>${inner}</${node.tag}>`;
}

// -- building blocks ---------------------------------------------------------

interface RenderCtx {
  cohort: Cohort;
  pending: boolean;
  highlights: AdditionDoc[];
}

function highlighted(ctx: RenderCtx, kind: string, object: string, name?: string): boolean {
  return ctx.highlights.some(
    (a) =>
      a.kind === kind &&
      a.object === object &&
      (kind === "object" || a.name === name),
  );
}

function button(
  ctx: RenderCtx,
  control: string,
  label: string,
  args: Record<string, string> = {},
  opts: { disabled?: boolean } = {},
): VNode {
  const action: WireAction = CONTROL_ACTIONS[control]!;
  const kind = control === "finish" ? "edit" : controlKind(action, ctx.cohort);
  const attrs: Record<string, string | true> = {
    type: "button",
    class: kind === "synthesis" ? "blue" : "grey",
    "data-control": control,
    "data-action": action,
    "data-kind": kind,
    ...args,
  };
  // blue buttons go dark while an action is in flight
  if (opts.disabled || (kind === "synthesis" && ctx.pending)) attrs.disabled = true;
  return h("button", attrs, label);
}

function synthesisAllowed(cohort: Cohort): boolean {
  return cohort !== "controlNoSynthesis";
}

function textControl(
  control: string,
  value: string,
  args: Record<string, string>,
): VNode {
  return h("input", {
    type: "text",
    value,
    "data-control": control,
    "data-action": CONTROL_ACTIONS[control]!,
    "data-kind": "edit",
    ...args,
  });
}

function typeOptions(current: FieldTypeDoc | null, model: ModelDoc): VNode[] {
  const out: VNode[] = [];
  for (const p of PRIMITIVES) {
    const attrs: Record<string, string | true> = { value: `primitive:${p}` };
    if (current && current.kind === "primitive" && current.primitive === p) {
      attrs.selected = true;
    }
    out.push(h("option", attrs, p));
  }
  for (const o of activeObjects(model)) {
    const attrs: Record<string, string | true> = { value: `object:${o.name}` };
    if (current && current.kind === "object" && current.target === o.name) {
      attrs.selected = true;
    }
    out.push(h("option", attrs, o.name));
  }
  return out;
}

function addObjectRow(ctx: RenderCtx): VNode {
  return h(
    "div",
    { class: "add-row" },
    h("input", {
      type: "text",
      placeholder: "object name",
      "data-input": "newObjectName",
    }),
    button(ctx, "addObject", "Add Object", { "data-commit-from": "newObjectName" }),
  );
}

// -- screens ------------------------------------------------------------------

function promptScreen(state: UiState): VNode {
  const ctx: RenderCtx = {
    cohort: state.cohortDraft,
    pending: state.pending,
    highlights: [],
  };
  return h(
    "section",
    { "data-step": "1", class: "screen" },
    h("h1", {}, "Describe the app you want"),
    h(
      "textarea",
      { "data-input": "prompt", rows: "6", placeholder: "I would like an app that ..." },
      state.promptDraft,
    ),
    button(ctx, "begin", "Begin", {}, { disabled: !state.promptDraft.trim() }),
  );
}

function chipScreen(view: SessionView, ctx: RenderCtx): VNode {
  const chips = activeObjects(view.model).map((o) =>
    h(
      "li",
      {
        "data-chip": o.name,
        class: highlighted(ctx, "object", o.name) ? "chip new" : "chip",
      },
      textControl("renameObject", o.name, { "data-object": o.name }),
      button(ctx, "deleteObject", "Delete", {
        "data-object": o.name,
        "data-path-kind": "object",
      }),
    ),
  );
  return h(
    "section",
    { "data-step": "2-3", class: "screen" },
    h("p", { class: "prompt" }, view.prompt),
    h("ul", { class: "chips" }, chips),
    addObjectRow(ctx),
    synthesisAllowed(view.cohort)
      ? h(
          "div",
          { class: "synthesis-row" },
          button(ctx, "autoAddObject", "Auto Add Object"),
          button(ctx, "generate", "Generate Fields and Methods", {
            "data-step-trigger": "4",
          }),
        )
      : null,
  );
}

function fieldRow(view: SessionView, ctx: RenderCtx, obj: ObjectDoc, name: string): VNode {
  const f = obj.fields.find((x) => x.name === name && !x.deleted)!;
  const isNew = highlighted(ctx, "field", obj.name, f.name);
  const label = typeLabel(f.type);
  const typeAttrs: Record<string, string | true> = {
    "data-control": "editFieldType",
    "data-action": "editField",
    "data-kind": "edit",
    "data-object": obj.name,
    "data-field": f.name,
    "data-type-chip": label,
  };
  if (f.type.kind === "object") typeAttrs["data-ref-target"] = f.type.target;
  const row: VChild[] = [
    textControl("renameField", f.name, {
      "data-object": obj.name,
      "data-field": f.name,
    }),
    h("select", typeAttrs, typeOptions(f.type, view.model)),
    button(ctx, "toggleMultiplicity", f.multiplicity, {
      "data-object": obj.name,
      "data-field": f.name,
      "data-multiplicity": f.multiplicity,
    }),
  ];
  if (f.type.kind === "object") {
    row.push(
      button(ctx, "toggleTwoWay", f.reverseOf ? "Two-way: on" : "Two-way: off", {
        "data-object": obj.name,
        "data-field": f.name,
        "data-two-way": f.reverseOf ? "on" : "off",
      }),
    );
  }
  row.push(
    button(ctx, "deleteField", "Delete", {
      "data-object": obj.name,
      "data-name": f.name,
      "data-path-kind": "field",
    }),
  );
  return h(
    "li",
    {
      "data-field-row": `${obj.name}.${f.name}`,
      class: isNew ? "field new" : "field",
    },
    row,
  );
}

function card(view: SessionView, ctx: RenderCtx, obj: ObjectDoc): VNode {
  const fields = obj.fields
    .filter((f) => !f.deleted)
    .map((f) => fieldRow(view, ctx, obj, f.name));
  const methods = obj.methods
    .filter((m) => !m.deleted)
    .map((m) =>
      h(
        "li",
        {
          "data-method-row": `${obj.name}.${m.name}`,
          class: highlighted(ctx, "method", obj.name, m.name) ? "method new" : "method",
        },
        h("span", { class: "method-name" }, m.name),
        button(ctx, "deleteMethod", "Delete", {
          "data-object": obj.name,
          "data-name": m.name,
          "data-path-kind": "method",
        }),
      ),
    );
  const header: VChild[] = [
    textControl("renameObject", obj.name, { "data-object": obj.name }),
    button(ctx, "deleteObject", "Delete", {
      "data-object": obj.name,
      "data-path-kind": "object",
    }),
  ];
  if (synthesisAllowed(view.cohort)) {
    header.push(
      button(ctx, "autoAddField", "Auto Add Field", { "data-object": obj.name }),
      button(ctx, "autoAddMethod", "Auto Add Method", { "data-object": obj.name }),
    );
  }
  return h(
    "article",
    {
      "data-card": obj.name,
      class: highlighted(ctx, "object", obj.name) ? "card new" : "card",
    },
    h("header", {}, header),
    h("h3", {}, "Fields"),
    h("ul", { class: "fields" }, fields),
    h(
      "div",
      { class: "add-row" },
      h("input", {
        type: "text",
        placeholder: "field name",
        "data-input": `newFieldName:${obj.name}`,
      }),
      h(
        "select",
        { "data-input": `newFieldType:${obj.name}` },
        typeOptions(null, view.model),
      ),
      button(ctx, "addField", "Add Field", {
        "data-object": obj.name,
        "data-commit-from": `newFieldName:${obj.name}`,
        "data-type-from": `newFieldType:${obj.name}`,
      }),
    ),
    h("h3", {}, "Methods"),
    h("ul", { class: "methods" }, methods),
    h(
      "div",
      { class: "add-row" },
      h("input", {
        type: "text",
        placeholder: "method name",
        "data-input": `newMethodName:${obj.name}`,
      }),
      button(ctx, "addMethod", "Add Method", {
        "data-object": obj.name,
        "data-commit-from": `newMethodName:${obj.name}`,
      }),
    ),
  );
}

interface DeletedEntry {
  kind: string;
  object: string;
  name: string | null;
  label: string;
}

function deletedEntries(model: ModelDoc): DeletedEntry[] {
  const out: DeletedEntry[] = [];
  for (const o of model.objects) {
    if (o.deleted) {
      out.push({ kind: "object", object: o.name, name: null, label: o.name });
      continue; // restoring the object brings its members back with it
    }
    for (const f of o.fields) {
      if (f.deleted) {
        out.push({
          kind: "field",
          object: o.name,
          name: f.name,
          label: `${o.name}.${f.name}`,
        });
      }
    }
    for (const m of o.methods) {
      if (m.deleted) {
        out.push({
          kind: "method",
          object: o.name,
          name: m.name,
          label: `${o.name}.${m.name}()`,
        });
      }
    }
  }
  return out;
}

function deletedTray(view: SessionView, ctx: RenderCtx, open: boolean): VNode | null {
  const entries = deletedEntries(view.model);
  if (entries.length === 0) return null;
  const items = open
    ? h(
        "ul",
        { class: "deleted-items" },
        entries.map((e) => {
          const args: Record<string, string> = {
            "data-object": e.object,
            "data-path-kind": e.kind,
          };
          if (e.name !== null) args["data-name"] = e.name;
          return h(
            "li",
            { "data-deleted": `${e.kind}:${e.label}` },
            h("span", {}, e.label),
            button(ctx, "restore", "Restore", args),
          );
        }),
      )
    : null;
  return h(
    "section",
    { "data-tray": open ? "open" : "closed", class: "tray" },
    h(
      "button",
      { type: "button", class: "grey", "data-control": "trayToggle" },
      `Deleted (${entries.length})`,
    ),
    items,
  );
}

function editorScreen(view: SessionView, ctx: RenderCtx): VNode {
  const cards = activeObjects(view.model).map((o) => card(view, ctx, o));
  return h(
    "section",
    { "data-step": "5", class: "screen" },
    h("p", { class: "prompt" }, view.prompt),
    h("div", { class: "cards" }, cards),
    addObjectRow(ctx),
    synthesisAllowed(view.cohort)
      ? button(ctx, "autoAddObjectFull", "Auto Add Object")
      : null,
    button(ctx, "finish", "Finish"),
  );
}

function doneScreen(state: UiState, view: SessionView): VNode {
  return h(
    "section",
    { "data-step": "done", class: "screen" },
    h("h1", {}, "Finished"),
    h("p", {}, `${view.componentCount} components in the final model.`),
    h("pre", { "data-export": "true" }, state.exportText ?? ""),
  );
}

export function renderApp(state: UiState): VNode {
  const view = state.view;
  const children: (VNode | null)[] = [];
  if (view === null) {
    children.push(promptScreen(state));
  } else {
    const ctx: RenderCtx = {
      cohort: view.cohort,
      pending: state.pending,
      highlights: state.highlights,
    };
    if (view.finished) {
      children.push(doneScreen(state, view));
    } else if (view.phase === "drafting_names") {
      children.push(chipScreen(view, ctx), deletedTray(view, ctx, state.trayOpen));
    } else {
      children.push(editorScreen(view, ctx), deletedTray(view, ctx, state.trayOpen));
    }
  }
  const notice = state.notice
    ? h("p", { class: "notice", role: "alert" }, state.notice)
    : null;
  return h(
    "main",
    { class: state.pending ? "app pending" : "app", "data-pending": String(state.pending) },
    notice,
    children.filter((c): c is VNode => c !== null),
  );
}
