import "./style.css";
import { ApiClient } from "./api";
import { WorkspaceView } from "./render";
import { Workspace } from "./state";

// Served from the same origin as the API (the service mounts the built
// bundle under /ui), so absolute paths like /plans need no base URL.
const store = new Workspace(new ApiClient());
new WorkspaceView(document.getElementById("app")!, store);

const wanted = new URLSearchParams(window.location.search).get("plan");
if (wanted) {
  void store.openPlan(wanted);
} else {
  void store.loadPlans().then(() => {
    // a store with exactly one plan skips the chooser
    if (store.plans.length === 1) return store.openPlan(store.plans[0].id);
  });
}
