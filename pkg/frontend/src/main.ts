import { DialogApi } from "./api.js";
import { wireApp } from "./app.js";

const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app mount point");
}
wireApp(root, new DialogApi());
