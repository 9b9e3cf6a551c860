/** DOM layer: materialize the node tree and route user events.
 *
 * Listeners are delegated from the mount root, so re-rendering (a full
 * subtree replacement on every state change) never re-wires anything. The
 * payload for each wire action is read back from the activated element's
 * data attributes at event time.
 */

import type { ViewModel } from "./viewmodel.js";
import { renderApp, type VNode } from "./render.js";
import type { Cohort } from "./types.js";

export function toDom(node: VNode, doc: Document): HTMLElement {
  const el = doc.createElement(node.tag);
  for (const [key, value] of Object.entries(node.attrs)) {
    el.setAttribute(key, value === true ? "" : value);
  }
  for (const child of node.children) {
    if (typeof child === "string") el.appendChild(doc.createTextNode(child));
    else el.appendChild(toDom(child, doc));
  }
  return el;
}

function parseTypeValue(raw: string): Record<string, unknown> {
  const sep = raw.indexOf(":");
  const kind = raw.slice(0, sep);
  const rest = raw.slice(sep + 1);
  return kind === "primitive"
    ? { kind: "primitive", primitive: rest }
    : { kind: "object", target: rest };
}

function inputValue(root: Element, name: string): string {
  const el = root.querySelector(`[data-input="${name}"]`) as
    | HTMLInputElement
    | HTMLSelectElement
    | null;
  return el ? el.value : "";
}

function pathPayload(el: Element): Record<string, unknown> {
  const payload: Record<string, unknown> = {
    kind: el.getAttribute("data-path-kind"),
    object: el.getAttribute("data-object"),
  };
  const name = el.getAttribute("data-name");
  if (name !== null) payload.name = name;
  return payload;
}

/** Build the wire payload for a clicked control. */
export function clickPayload(root: Element, el: Element): Record<string, unknown> {
  const control = el.getAttribute("data-control") ?? "";
  switch (control) {
    case "autoAddField":
    case "autoAddMethod":
      return { object: el.getAttribute("data-object") };
    case "addObject":
      return { name: inputValue(root, el.getAttribute("data-commit-from") ?? "") };
    case "addField":
      return {
        object: el.getAttribute("data-object"),
        name: inputValue(root, el.getAttribute("data-commit-from") ?? ""),
        type: parseTypeValue(inputValue(root, el.getAttribute("data-type-from") ?? "")),
      };
    case "addMethod":
      return {
        object: el.getAttribute("data-object"),
        name: inputValue(root, el.getAttribute("data-commit-from") ?? ""),
      };
    case "toggleMultiplicity":
    case "toggleTwoWay":
      return {
        object: el.getAttribute("data-object"),
        field: el.getAttribute("data-field"),
      };
    case "deleteObject":
    case "deleteField":
    case "deleteMethod":
    case "restore":
      return pathPayload(el);
    default:
      return {};
  }
}

/** Build the wire payload for a committed text or select edit. */
export function changePayload(el: Element, value: string): Record<string, unknown> {
  const control = el.getAttribute("data-control") ?? "";
  switch (control) {
    case "renameObject":
      return { name: el.getAttribute("data-object"), newName: value };
    case "renameField":
      return {
        object: el.getAttribute("data-object"),
        field: el.getAttribute("data-field"),
        newName: value,
      };
    case "editFieldType":
      return {
        object: el.getAttribute("data-object"),
        field: el.getAttribute("data-field"),
        type: parseTypeValue(value),
      };
    default:
      return {};
  }
}

export function mount(root: Element, vm: ViewModel): void {
  const doc = root.ownerDocument;
  const rerender = () => {
    const tree = toDom(renderApp(vm.snapshot), doc);
    while (root.firstChild) root.removeChild(root.firstChild);
    root.appendChild(tree);
  };
  vm.subscribe(rerender);

  root.addEventListener("click", (event) => {
    const target = event.target as Element | null;
    const el = target?.closest("[data-control]");
    if (!el || el.tagName !== "BUTTON") return;
    const control = el.getAttribute("data-control");
    if (control === "trayToggle") {
      vm.toggleTray();
    } else if (control === "begin") {
      void vm.begin();
    } else if (control === "finish") {
      void vm.finish();
    } else {
      const action = el.getAttribute("data-action");
      if (action) void vm.dispatch(action, clickPayload(root, el));
    }
  });

  root.addEventListener("change", (event) => {
    const el = event.target as Element | null;
    if (!el || !el.getAttribute("data-control")) return;
    const action = el.getAttribute("data-action");
    if (!action) return;
    const value = (el as HTMLInputElement | HTMLSelectElement).value;
    void vm.dispatch(action, changePayload(el, value));
  });

  root.addEventListener("input", (event) => {
    const el = event.target as Element | null;
    if (!el) return;
    const name = el.getAttribute("data-input");
    if (name === "prompt") {
      // track the draft without re-rendering, or typing would lose focus;
      // the begin button's enablement is the only other thing that depends
      // on the draft, so patch exactly that
      const value = (el as HTMLTextAreaElement).value;
      vm.setPromptDraftQuietly(value);
      const begin = root.querySelector('[data-control="begin"]');
      if (begin && !vm.snapshot.pending) {
        if (value.trim()) begin.removeAttribute("disabled");
        else begin.setAttribute("disabled", "");
      }
    }
  });

  rerender();
}

export function bootCohort(raw: string | null): Cohort {
  return raw === "controlNoSynthesis" ? "controlNoSynthesis" : "full";
}
