// End-to-end flow against the real HTTP service on the bundled fixture store.
import { spawn, type ChildProcess } from "node:child_process";
import { afterAll, beforeAll, beforeEach, expect, test } from "vitest";
import { install } from "../src/app.js";

const PORT = 8917;
const BASE = `http://127.0.0.1:${PORT}`;
let server: ChildProcess;

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

async function until(cond: () => boolean, ms = 8000): Promise<void> {
  const deadline = Date.now() + ms;
  while (!cond()) {
    if (Date.now() > deadline) throw new Error("condition not reached");
    await sleep(25);
  }
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing #${id}`);
  return node as T;
}

// The speed fixture relates v = s/t with two of {v, s, t} given as integers.
// Whichever is missing is the target; fractions are legal answer values.
function solveSpeed(questionText: string): { value: string; unit: string } {
  const given: Record<string, number> = {};
  for (const m of questionText.matchAll(/\b([vst]) = (\d+)/g)) {
    given[m[1]!] = Number(m[2]!);
  }
  if (given.v !== undefined && given.t !== undefined) {
    return { value: String(given.v * given.t), unit: "m" };
  }
  if (given.s !== undefined && given.t !== undefined) {
    return { value: `${given.s}/${given.t}`, unit: "m/s" };
  }
  return { value: `${given.s}/${given.v}`, unit: "s" };
}

async function generateSpeedQuestion(): Promise<string> {
  el<HTMLInputElement>("concept").value = "speed";
  el<HTMLButtonElement>("generate").click();
  await until(
    () => el("question").textContent !== "" && !el<HTMLButtonElement>("answer").disabled,
  );
  return el("question").textContent ?? "";
}

beforeAll(async () => {
  server = spawn("python3", ["-m", "physquiz.cli", "serve", "--port", String(PORT)], {
    stdio: "ignore",
  });
  for (let attempt = 0; attempt < 100; attempt++) {
    try {
      const res = await fetch(`${BASE}/api/v1/health`);
      if (res.ok) return;
    } catch {
      // still starting
    }
    await sleep(200);
  }
  throw new Error("service did not come up");
});

afterAll(() => {
  server.kill();
});

beforeEach(() => {
  document.body.innerHTML = "";
  const root = document.createElement("div");
  document.body.appendChild(root);
  install(root, { apiBase: BASE });
});

test("answer controls stay disabled until a question exists", () => {
  expect(el<HTMLInputElement>("value").disabled).toBe(true);
  expect(el<HTMLInputElement>("unit").disabled).toBe(true);
  expect(el<HTMLButtonElement>("answer").disabled).toBe(true);
  expect(el<HTMLButtonElement>("reveal").disabled).toBe(true);
});

test("correct pair shows two green verdicts and the explanation", async () => {
  const questionText = await generateSpeedQuestion();
  expect(questionText).toContain('Concerning the concept of "speed"');

  const { value, unit } = solveSpeed(questionText);
  el<HTMLInputElement>("value").value = value;
  el<HTMLInputElement>("unit").value = unit;
  el<HTMLButtonElement>("answer").click();
  await until(() => el("value-verdict").textContent !== "");

  expect(el("value-verdict").classList.contains("correct")).toBe(true);
  expect(el("unit-verdict").classList.contains("correct")).toBe(true);
  expect(el("explanation").hidden).toBe(false);
  expect(el("explanation").textContent).toContain("Rearranged formula");
  expect(el("explanation").textContent).toContain("speed (Q3711325)");
});

test("wrong unit flags the unit field only and keeps the solution hidden", async () => {
  const questionText = await generateSpeedQuestion();
  const { value } = solveSpeed(questionText);
  el<HTMLInputElement>("value").value = value;
  el<HTMLInputElement>("unit").value = "kg";
  el<HTMLButtonElement>("answer").click();
  await until(() => el("unit-verdict").textContent !== "");

  expect(el("unit-verdict").classList.contains("incorrect")).toBe(true);
  expect(el("unit-verdict").textContent).toContain("Unit incorrect!");
  expect(el("value-verdict").classList.contains("correct")).toBe(true);
  expect(el("value-verdict").textContent).not.toContain("incorrect");
  expect(el("explanation").hidden).toBe(true);
  expect(el("explanation").textContent).toBe("");
});

test("fields stay editable and a corrected retry succeeds", async () => {
  const questionText = await generateSpeedQuestion();
  const { value, unit } = solveSpeed(questionText);
  el<HTMLInputElement>("value").value = "0";
  el<HTMLInputElement>("unit").value = unit;
  el<HTMLButtonElement>("answer").click();
  await until(() => el("value-verdict").textContent !== "");
  expect(el("value-verdict").textContent).toContain("Value incorrect!");
  expect(el("unit-verdict").classList.contains("correct")).toBe(true);

  el<HTMLInputElement>("value").value = value;
  el<HTMLButtonElement>("answer").click();
  await until(() => el("value-verdict").classList.contains("correct"));
  expect(el("explanation").hidden).toBe(false);
});

test("new generate clears verdicts and explanation", async () => {
  const questionText = await generateSpeedQuestion();
  const { value, unit } = solveSpeed(questionText);
  el<HTMLInputElement>("value").value = value;
  el<HTMLInputElement>("unit").value = unit;
  el<HTMLButtonElement>("answer").click();
  await until(() => el("value-verdict").textContent !== "");

  await generateSpeedQuestion();
  expect(el("value-verdict").textContent).toBe("");
  expect(el("unit-verdict").textContent).toBe("");
  expect(el("explanation").hidden).toBe(true);
});

test("reveal shows the explanation without grading blank fields", async () => {
  await generateSpeedQuestion();
  el<HTMLButtonElement>("reveal").click();
  await until(() => !el("explanation").hidden);
  expect(el("explanation").textContent).toContain("Result");
  expect(el("value-verdict").textContent).toBe("");
  expect(el("unit-verdict").textContent).toBe("");
});

test("unknown concept shows the service message verbatim", async () => {
  el<HTMLInputElement>("concept").value = "warp drive";
  el<HTMLButtonElement>("generate").click();
  await until(() => !el("banner").hidden);
  expect(el("banner").textContent).toBe("No Wikidata item with formula found.");
  expect(el("question").textContent).toBe("");
  expect(el<HTMLButtonElement>("answer").disabled).toBe(true);
});
