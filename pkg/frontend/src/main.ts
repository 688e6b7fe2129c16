import { install } from "./app.js";

const root = document.querySelector<HTMLElement>("#app");
if (root === null) throw new Error("missing #app mount point");
install(root);
