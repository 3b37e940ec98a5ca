/** Browser entry point: connect to the service on the same origin. */

import { ApiClient, HttpTransport } from "./api.js";
import { App } from "./app.js";

const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app container");
}
const api = new ApiClient(new HttpTransport(""));
const blob = window.location.hash.replace(/^#/, "") || null;
const app = App.fromBlob(root, api, blob);

void (async () => {
  await app.refreshDatasets().catch(() => undefined);
  if (app.state.datasetId) {
    await app.refresh();
  } else {
    await app.loadDemo("S1");
  }
})();
