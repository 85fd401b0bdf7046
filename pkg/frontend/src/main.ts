import { ApiClient } from "./api.js";
import { createApp } from "./app.js";

// Entry point for the static page. The service base URL comes from the
// ?api= query parameter, defaulting to the local dev service.
const apiBase =
  new URLSearchParams(window.location.search).get("api") ?? "http://127.0.0.1:8571";

const root = document.getElementById("app");
if (root) {
  createApp(root, new ApiClient(apiBase));
} else {
  console.error("missing #app mount point");
}
