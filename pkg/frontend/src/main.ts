import { ApiClient } from "./api.js";
import { createApp } from "./app.js";

declare global {
  interface Window {
    CRASHBOARD_API?: string;
  }
}

const root = document.getElementById("app");
if (root === null) {
  throw new Error("missing #app container");
}
createApp(root, new ApiClient(window.CRASHBOARD_API ?? ""));
