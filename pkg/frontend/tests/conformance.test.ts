/** End-to-end conformance against the real session service.
 *
 * Spawns the installed server on the recorded replay fixtures, drives the
 * five-step flow through the mounted page, and checks the exported model is
 * byte-identical to a headless run issuing the same wire actions directly.
 */

import { execFile, spawn, type ChildProcess } from "node:child_process";
import { mkdtemp, rm } from "node:fs/promises";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { promisify } from "node:util";
import { afterAll, beforeAll, beforeEach, describe, expect, it } from "vitest";

import { FetchTransport } from "../src/api.js";
import {
  PROMPT,
  SIX_NAMES,
  click,
  mountApp,
  settle,
  typeInto,
  unmountAll,
  type App,
} from "./helpers.js";

const run = promisify(execFile);
const PORT = 8917;
const BASE = `http://127.0.0.1:${PORT}`;

let workDir: string;
let server: ChildProcess;
let serverLog = "";

async function waitForServer(): Promise<void> {
  const deadline = Date.now() + 20_000;
  for (;;) {
    try {
      const resp = await fetch(`${BASE}/sessions/probe`);
      if (resp.status === 404) return;
    } catch {
      // not listening yet
    }
    if (Date.now() > deadline) {
      throw new Error(`server never came up\n${serverLog}`);
    }
    await new Promise((r) => setTimeout(r, 100));
  }
}

beforeAll(async () => {
  workDir = await mkdtemp(join(tmpdir(), "draftsmith-ui-"));
  await run("draftsmith", ["fixtures", "--out", join(workDir, "fixtures")]);
  server = spawn(
    "draftsmith",
    [
      "serve",
      "--port",
      String(PORT),
      "--host",
      "127.0.0.1",
      "--data-dir",
      join(workDir, "sessions"),
      "--replay",
      join(workDir, "fixtures", "manifest.json"),
    ],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  server.stdout?.on("data", (chunk) => (serverLog += chunk));
  server.stderr?.on("data", (chunk) => (serverLog += chunk));
  await waitForServer();
});

afterAll(async () => {
  server?.kill("SIGTERM");
  await new Promise((r) => setTimeout(r, 200));
  if (workDir) await rm(workDir, { recursive: true, force: true });
});

beforeEach(() => unmountAll());

function realApp(): App {
  return mountApp(new FetchTransport(fetch), BASE);
}

async function rawPost(path: string, body: unknown): Promise<Record<string, unknown>> {
  const resp = await fetch(`${BASE}${path}`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });
  if (resp.status >= 400) throw new Error(`${path}: ${resp.status} ${await resp.text()}`);
  return (await resp.json()) as Record<string, unknown>;
}

describe("five-step flow in the page", () => {
  it("produces the same export as a headless run of the same actions", async () => {
    const app = realApp();

    // step 1: prompt, then begin
    typeInto(app.root, '[data-input="prompt"]', PROMPT);
    click(app.root, '[data-control="begin"]');
    await settle(app.vm);

    // steps 2-3: the six drafted names appear as chips
    const chips = Array.from(app.root.querySelectorAll("[data-chip]")).map((el) =>
      el.getAttribute("data-chip"),
    );
    expect(new Set(chips)).toEqual(new Set(SIX_NAMES));
    expect(app.root.querySelector('[data-step="2-3"]')).not.toBeNull();

    // step 4: generate, which opens the card editor
    click(app.root, '[data-step-trigger="4"]');
    await settle(app.vm);
    expect(app.root.querySelector('[data-step="5"]')).not.toBeNull();
    expect(app.root.querySelectorAll("[data-card]").length).toBeGreaterThanOrEqual(6);

    // step 5: synthesis per object, exactly the recorded demo order
    click(app.root, '[data-card="customer"] [data-control="autoAddField"]');
    await settle(app.vm);
    const highlighted = app.root.querySelectorAll(".new");
    expect(highlighted.length).toBeGreaterThan(0);

    click(app.root, '[data-card="waiter"] [data-control="autoAddMethod"]');
    await settle(app.vm);
    click(app.root, '[data-card="customer"] [data-control="autoAddMethod"]');
    await settle(app.vm);

    // then hand edits: flip a multiplicity, drop and restore a method
    const methodRow = app.root.querySelector('[data-card="waiter"] [data-method-row]')!;
    const methodName = methodRow
      .getAttribute("data-method-row")!
      .split(".")
      .slice(1)
      .join(".");
    click(
      app.root,
      '[data-field-row="customer.reservation"] [data-control="toggleMultiplicity"]',
    );
    await settle(app.vm);
    click(app.root, `[data-method-row="waiter.${methodName}"] [data-control="deleteMethod"]`);
    await settle(app.vm);
    click(app.root, '[data-control="trayToggle"]');
    click(app.root, '[data-deleted^="method:waiter."] [data-control="restore"]');
    await settle(app.vm);

    // finish: the done screen shows the export
    click(app.root, '[data-control="finish"]');
    await settle(app.vm);
    const shown = app.root.querySelector('[data-export="true"]')!.textContent ?? "";
    expect(app.vm.snapshot.view!.finished).toBe(true);
    expect(shown).toBe(app.vm.snapshot.exportText);

    // headless: the same wire actions straight against the API
    const created = await rawPost("/sessions", { prompt: PROMPT, cohort: "full" });
    const sid = created.id as string;
    const act = (action: string, payload: Record<string, unknown> = {}) =>
      rawPost(`/sessions/${sid}/actions`, { action, payload });
    await act("begin");
    await act("generateFieldsAndMethods");
    await act("autoAddField", { object: "customer" });
    await act("autoAddMethod", { object: "waiter" });
    await act("autoAddMethod", { object: "customer" });
    await act("toggleMultiplicity", { object: "customer", field: "reservation" });
    await act("deleteComponent", { kind: "method", object: "waiter", name: methodName });
    await act("restoreComponent", { kind: "method", object: "waiter", name: methodName });
    const finished = await fetch(`${BASE}/sessions/${sid}/finish`, { method: "POST" });
    const headlessExport = await finished.text();

    expect(shown).toBe(headlessExport);
  }, 60_000);

  it("rename propagates to type chips, and a reload reproduces the rendering", async () => {
    const first = realApp();
    typeInto(first.root, '[data-input="prompt"]', PROMPT);
    click(first.root, '[data-control="begin"]');
    await settle(first.vm);
    click(first.root, '[data-step-trigger="4"]');
    await settle(first.vm);

    // rename menu item -> dish in its card's text box
    const refsBefore = first.root.querySelectorAll('[data-ref-target="menu item"]').length;
    const box = first.root.querySelector(
      '[data-card="menu item"] [data-control="renameObject"]',
    ) as HTMLInputElement;
    box.value = "dish";
    box.dispatchEvent(new Event("change", { bubbles: true }));
    await settle(first.vm);

    expect(first.root.querySelector('[data-card="dish"]')).not.toBeNull();
    expect(first.root.querySelector('[data-card="menu item"]')).toBeNull();
    expect(first.root.querySelectorAll('[data-ref-target="menu item"]')).toHaveLength(0);
    expect(first.root.querySelectorAll('[data-ref-target="dish"]')).toHaveLength(refsBefore);

    // a fresh page attaching to the session renders the identical tree
    const sessionId = first.vm.snapshot.view!.id;
    const before = first.root.innerHTML;
    expect(before).toContain("dish");

    unmountAll();
    const second = realApp();
    await second.vm.attach(sessionId);
    expect(second.root.innerHTML).toBe(before);
  }, 60_000);
});

describe("control arm in the page", () => {
  it("renders zero synthesis controls and still edits and finishes", async () => {
    const app = realApp();
    app.vm.setCohortDraft("controlNoSynthesis");
    typeInto(app.root, '[data-input="prompt"]', "I want a todo list app.");
    click(app.root, '[data-control="begin"]');
    await settle(app.vm);

    // control sessions land straight in the editor with no blue buttons
    expect(app.vm.snapshot.view!.cohort).toBe("controlNoSynthesis");
    expect(app.root.querySelector('[data-step="5"]')).not.toBeNull();
    expect(app.root.querySelectorAll('[data-kind="synthesis"]')).toHaveLength(0);

    typeInto(app.root, '[data-input="newObjectName"]', "task");
    click(app.root, '[data-control="addObject"]');
    await settle(app.vm);
    expect(app.root.querySelector('[data-card="task"]')).not.toBeNull();

    typeInto(app.root, '[data-input="newFieldName:task"]', "title");
    click(app.root, '[data-card="task"] [data-control="addField"]');
    await settle(app.vm);
    expect(
      app.root.querySelector('[data-field-row="task.title"]'),
    ).not.toBeNull();

    click(app.root, '[data-control="finish"]');
    await settle(app.vm);
    const doc = JSON.parse(app.vm.snapshot.exportText ?? "{}") as {
      phase: string;
      objects: { name: string; fields: { name: string }[] }[];
    };
    expect(doc.phase).toBe("finished");
    expect(doc.objects.map((o) => o.name)).toEqual(["task"]);
    expect(doc.objects[0]!.fields.map((f) => f.name)).toEqual(["title"]);
  }, 60_000);
});
