/** Shared test rig: canned session views, capturing transports, and a
 * mounted app harness. */

import { ApiClient, type Transport, type WireRequest, type WireResponse } from "../src/api.js";
import { mount } from "../src/dom.js";
import { ViewModel } from "../src/viewmodel.js";
import type {
  Cohort,
  FieldDoc,
  FieldTypeDoc,
  MethodDoc,
  ModelDoc,
  Multiplicity,
  ObjectDoc,
  Phase,
  SessionView,
} from "../src/types.js";

export const SIX_NAMES = [
  "customer",
  "reservation",
  "order",
  "menu item",
  "table",
  "waiter",
];

export const PROMPT =
  "I want a restaurant management app tracking customers, their reservations, " +
  "their orders, and menu items.";

// -- document builders ---------------------------------------------------------

export function prim(name: string): FieldTypeDoc {
  return { kind: "primitive", primitive: name };
}

export function ref(target: string): FieldTypeDoc {
  return { kind: "object", target };
}

export function fieldDoc(
  name: string,
  type: FieldTypeDoc,
  multiplicity: Multiplicity = "one",
  extra: Partial<FieldDoc> = {},
): FieldDoc {
  return {
    name,
    type,
    multiplicity,
    deleted: false,
    provenance: "synthesized",
    ...extra,
  };
}

export function methodDoc(name: string, extra: Partial<MethodDoc> = {}): MethodDoc {
  return { name, deleted: false, provenance: "synthesized", ...extra };
}

export function objDoc(
  name: string,
  fields: FieldDoc[] = [],
  methods: MethodDoc[] = [],
  extra: Partial<ObjectDoc> = {},
): ObjectDoc {
  return { name, deleted: false, provenance: "synthesized", fields, methods, ...extra };
}

export function makeView(
  objects: ObjectDoc[],
  overrides: Partial<SessionView> = {},
): SessionView {
  const phase: Phase = overrides.phase ?? "full_model";
  const model: ModelDoc = { prompt: PROMPT, phase, objects };
  return {
    id: "s1",
    prompt: PROMPT,
    cohort: "full",
    phase,
    finished: false,
    createdAtMs: 0,
    finishedAtMs: null,
    componentCount: 0,
    model,
    diagnostics: [],
    ...overrides,
    ...(overrides.model ? { model: overrides.model } : { model }),
  };
}

export function draftingView(overrides: Partial<SessionView> = {}): SessionView {
  return makeView(
    SIX_NAMES.map((n) => objDoc(n)),
    { phase: "drafting_names", ...overrides },
  );
}

export function editorView(overrides: Partial<SessionView> = {}): SessionView {
  const objects = [
    objDoc(
      "customer",
      [
        fieldDoc("name", prim("string")),
        fieldDoc("email", prim("string")),
        fieldDoc("reservation", ref("reservation")),
        fieldDoc("order", ref("order"), "many"),
      ],
      [methodDoc("makeReservation"), methodDoc("cancelReservation")],
    ),
    objDoc(
      "reservation",
      [fieldDoc("date", prim("datetime")), fieldDoc("party size", prim("int"))],
      [methodDoc("confirm")],
    ),
    objDoc("order", [fieldDoc("menu item", ref("menu item"), "many")]),
    objDoc("menu item", [
      fieldDoc("name", prim("string")),
      fieldDoc("price", prim("float")),
    ]),
    objDoc("table", [fieldDoc("seats", prim("int"))]),
    objDoc("waiter", [fieldDoc("name", prim("string"))], [methodDoc("takeOrder")]),
  ];
  return makeView(objects, overrides);
}

// -- transports ------------------------------------------------------------------

/** Answers every request from a single mutable view; captures the wire. */
export class StubServer implements Transport {
  requests: WireRequest[] = [];
  exportBody = "{}\n";

  constructor(
    public view: SessionView,
    public onAction: (
      action: string,
      payload: Record<string, unknown>,
      view: SessionView,
    ) => SessionView = (_a, _p, v) => v,
  ) {}

  async send(req: WireRequest): Promise<WireResponse> {
    this.requests.push(structuredClone(req));
    const path = new URL(req.url).pathname;
    if (req.method === "POST" && path === "/sessions") {
      return { status: 201, text: JSON.stringify(this.view) };
    }
    if (req.method === "POST" && path.endsWith("/actions")) {
      const body = req.body as { action: string; payload?: Record<string, unknown> };
      this.view = this.onAction(body.action, body.payload ?? {}, this.view);
      return { status: 200, text: JSON.stringify(this.view) };
    }
    if (req.method === "POST" && path.endsWith("/finish")) {
      this.view = {
        ...this.view,
        finished: true,
        phase: "finished",
        model: { ...this.view.model, phase: "finished" },
      };
      return { status: 200, text: this.exportBody };
    }
    if (req.method === "GET" && path.endsWith("/export")) {
      return { status: 200, text: this.exportBody };
    }
    if (req.method === "GET") {
      return { status: 200, text: JSON.stringify(this.view) };
    }
    return {
      status: 404,
      text: JSON.stringify({ error: { code: "not_found", message: path } }),
    };
  }
}

/** Holds every response until released, to observe in-flight states. */
export class GatedTransport implements Transport {
  requests: WireRequest[] = [];
  private waiting: ((resp: WireResponse) => void)[] = [];

  send(req: WireRequest): Promise<WireResponse> {
    this.requests.push(structuredClone(req));
    return new Promise((resolve) => this.waiting.push(resolve));
  }

  get inFlight(): number {
    return this.waiting.length;
  }

  release(body: unknown, status = 200): void {
    const next = this.waiting.shift();
    if (!next) throw new Error("nothing in flight to release");
    next({ status, text: typeof body === "string" ? body : JSON.stringify(body) });
  }
}

// -- mounted app harness -----------------------------------------------------------

export interface App {
  root: HTMLElement;
  vm: ViewModel;
  api: ApiClient;
}

export function mountApp(transport: Transport, base = "http://svc.test"): App {
  const api = new ApiClient(base, transport);
  const vm = new ViewModel(api);
  const root = document.createElement("div");
  document.body.appendChild(root);
  mount(root, vm);
  return { root, vm, api };
}

export function unmountAll(): void {
  document.body.innerHTML = "";
}

const sleep = (ms: number) => new Promise((r) => setTimeout(r, ms));

/** Wait until no action is in flight. */
export async function settle(vm: ViewModel, timeoutMs = 10_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (vm.snapshot.pending) {
    if (Date.now() > deadline) throw new Error("action never settled");
    await sleep(2);
  }
}

export function click(root: HTMLElement, selector: string): void {
  const el = root.querySelector(selector) as HTMLElement | null;
  if (!el) throw new Error(`no element matches ${selector}`);
  el.click();
}

export function typeInto(root: HTMLElement, selector: string, value: string): void {
  const el = root.querySelector(selector) as HTMLInputElement | null;
  if (!el) throw new Error(`no element matches ${selector}`);
  el.value = value;
  el.dispatchEvent(new Event("input", { bubbles: true }));
}

export function commitChange(root: HTMLElement, selector: string, value: string): void {
  const el = root.querySelector(selector) as HTMLInputElement | null;
  if (!el) throw new Error(`no element matches ${selector}`);
  el.value = value;
  el.dispatchEvent(new Event("change", { bubbles: true }));
}

/** Begin from the prompt screen: type the prompt, then click Begin. */
export async function beginSession(
  app: App,
  prompt = PROMPT,
  cohort: Cohort = "full",
): Promise<void> {
  app.vm.setCohortDraft(cohort);
  typeInto(app.root, '[data-input="prompt"]', prompt);
  click(app.root, '[data-control="begin"]');
  await settle(app.vm);
}
