/** Page entry point.
 *
 * Query parameters:
 *   api=<base url>   session service address (default http://127.0.0.1:8708)
 *   cohort=<name>    study arm for new sessions (default full)
 *   session=<id>     re-attach to an existing session after a reload
 */

import { ApiClient, FetchTransport } from "./api.js";
import { bootCohort, mount } from "./dom.js";
import { ViewModel } from "./viewmodel.js";

const params = new URLSearchParams(window.location.search);
const base = params.get("api") ?? "http://127.0.0.1:8708";

const api = new ApiClient(base, new FetchTransport());
const vm = new ViewModel(api);
vm.setCohortDraft(bootCohort(params.get("cohort")));

const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");
mount(root, vm);

const sessionId = params.get("session");
if (sessionId) {
  vm.attach(sessionId).catch((err) => {
    console.error("could not attach to session", sessionId, err);
  });
}

// keep the session id in the address bar so a reload lands back in it
vm.subscribe((state) => {
  if (state.view && params.get("session") !== state.view.id) {
    params.set("session", state.view.id);
    const next = `${window.location.pathname}?${params.toString()}`;
    window.history.replaceState(null, "", next);
  }
});
