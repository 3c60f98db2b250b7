/**
 * Browser entry point. The API base defaults to the page's own origin
 * (the static assets are served next to the API); append ?api=... to
 * point the workbench at a service running elsewhere.
 */

import { ApiClient } from "./api.js";
import { Workbench } from "./app.js";
import { renderTo } from "./dom.js";

function apiBase(): string {
  const params = new URLSearchParams(window.location.search);
  const override = params.get("api");
  if (override) {
    return override.replace(/\/$/, "");
  }
  return window.location.origin;
}

const mount = document.getElementById("app");
if (mount === null) {
  throw new Error("missing #app mount point");
}

const bench = new Workbench(new ApiClient(apiBase()));
bench.onChange = () => renderTo(mount, bench.render());
void bench.start();
