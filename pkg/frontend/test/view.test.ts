// @vitest-environment happy-dom
import { describe, expect, it } from "vitest";

import { SessionClient } from "../src/client.js";
import { ConsoleApp } from "../src/view.js";
import { FakeSocket } from "./fake.js";

const DUMP = [
  "% rules (3)",
  "p :- a.",
  "{q} :- b(1).",
  "__e3 :- __e3.",
  "% inputs (3)",
  "a = t",
  "b(1) = u",
  "b(2) = f",
  "% assumptions (1)",
  "q = f",
  "% show (1)",
  "#show p/0.",
  "% released (1)",
  "__e3",
].join("\n");

const DIGEST = { rules: 3, inputs: 3, i_true: 1, i_open: 1, j_true: 0, j_false: 1 };

function setup() {
  const socket = new FakeSocket();
  const client = new SessionClient(socket, "s");
  socket.fireOpen();
  const root = document.createElement("div");
  document.body.append(root);
  const app = new ConsoleApp(document, root, client, { reconnect: () => undefined });
  return { socket, client, root, app };
}

function typeCommand(root: HTMLElement, text: string): void {
  const box = root.querySelector<HTMLInputElement>(".command-box")!;
  const form = root.querySelector<HTMLFormElement>(".command-form")!;
  box.value = text;
  form.dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
}

async function showState(
  socket: FakeSocket,
  app: ConsoleApp,
  id = 1,
  dump = DUMP,
): Promise<void> {
  app.lastSubmission = app.submitCommand("state");
  socket.reply({ id, status: "ok", warnings: [], message: dump, "state-digest": DIGEST });
  await app.lastSubmission;
}

describe("command box", () => {
  it("sends the typed line and renders models with a SAT badge", async () => {
    const { socket, root, app } = setup();
    typeCommand(root, "query a");
    expect(socket.commands()).toEqual(["query a"]);
    socket.reply({
      id: 1,
      status: "ok",
      warnings: [],
      verdict: "yes",
      sat: "SAT",
      models: [["a", "b"]],
    });
    await app.lastSubmission;
    const log = root.querySelector(".log")!.textContent!;
    expect(log).toContain("?- query a");
    expect(log).toContain("Answer: 1");
    expect(log).toContain("a b");
    expect(root.querySelector(".badge.sat")!.textContent).toBe("SAT");
  });

  it("renders errors inline and keeps the session usable", async () => {
    const { socket, root, app } = setup();
    typeCommand(root, "option -z");
    socket.reply({ id: 1, status: "error", message: "unsupported option '-z'" });
    await app.lastSubmission;
    expect(root.querySelector(".log .error")!.textContent).toBe(
      "error: unsupported option '-z'",
    );
    typeCommand(root, "query a");
    expect(socket.commands()).toEqual(["option -z", "query a"]);
  });

  it("renders warnings on their own lines", async () => {
    const { socket, root, app } = setup();
    typeCommand(root, "assert zz");
    socket.reply({
      id: 1,
      status: "ok",
      warnings: ["zz is not an input atom"],
      "state-digest": DIGEST,
    });
    await app.lastSubmission;
    expect(root.querySelector(".log .warn")!.textContent).toBe(
      "warning: zz is not an input atom",
    );
  });

  it("marks the prompt while a define block is open", async () => {
    const { socket, root, app } = setup();
    typeCommand(root, "define");
    socket.reply({ id: 1, status: "ok", warnings: [], pending: true });
    await app.lastSubmission;
    expect(root.querySelector(".prompt")!.textContent).toBe("..");
    typeCommand(root, "a. ?");
    socket.reply({
      id: 2,
      status: "ok",
      warnings: [],
      message: "defined: 1 rules",
      "state-digest": DIGEST,
    });
    await app.lastSubmission;
    expect(root.querySelector(".prompt")!.textContent).toBe("?-");
  });

  it("recalls history with the arrow keys", async () => {
    const { socket, root, app } = setup();
    typeCommand(root, "query a");
    socket.reply({ id: 1, status: "ok", warnings: [], sat: "SAT", models: [] });
    await app.lastSubmission;
    const box = root.querySelector<HTMLInputElement>(".command-box")!;
    box.dispatchEvent(new KeyboardEvent("keydown", { key: "ArrowUp", bubbles: true }));
    expect(box.value).toBe("query a");
    box.dispatchEvent(new KeyboardEvent("keydown", { key: "ArrowDown", bubbles: true }));
    expect(box.value).toBe("");
  });
});

describe("state inspector", () => {
  it("fills all five panels from a state dump response", async () => {
    const { socket, root, app } = setup();
    await showState(socket, app);
    const rules = root.querySelectorAll(".panel-rules li");
    expect([...rules].map((li) => li.textContent)).toEqual([
      "p :- a.",
      "{q} :- b(1).",
      "__e3 :- __e3.",
    ]);
    const inputs = root.querySelectorAll(".panel-inputs li");
    expect(inputs).toHaveLength(3);
    const aRow = root.querySelector('.panel-inputs li[data-atom="a"]')!;
    expect(aRow.querySelector('button[data-value="t"]')!.classList.contains("on")).toBe(
      true,
    );
    expect(root.querySelector(".panel-assumptions li code")!.textContent).toBe("not q");
    expect(root.querySelector(".panel-show li")!.textContent).toBe("#show p/0.");
    expect(root.querySelector('.panel-released li[data-atom="__e3"]')).not.toBeNull();
    expect(root.querySelector(".digest")!.textContent).toBe(
      "rules 3 · inputs 3 · i 1t/1u · j 0t/1f",
    );
  });

  it("shows the empty state as empty panels", async () => {
    const { socket, root, app } = setup();
    const empty = ["% rules (0)", "% inputs (0)", "% assumptions (0)", "% show (0)", "% released (0)"].join("\n");
    await showState(socket, app, 1, empty);
    for (const name of ["rules", "inputs", "assumptions", "show", "released"]) {
      expect(root.querySelectorAll(`.panel-${name} li`)).toHaveLength(0);
    }
  });

  it("falls back to raw text when a dump does not parse", async () => {
    const { socket, root, app } = setup();
    const broken = "% rules (5)\nonly one line";
    await showState(socket, app, 1, broken);
    expect(root.querySelector(".log .message")!.textContent).toBe(broken);
    expect(root.querySelectorAll(".panel-inputs li")).toHaveLength(0);
  });
});

describe("input toggles", () => {
  it("emits exactly one command and repaints only on confirmation", async () => {
    const { socket, root, app } = setup();
    await showState(socket, app);
    const before = socket.sent.length;

    const button = root.querySelector<HTMLButtonElement>(
      '.panel-inputs li[data-atom="b(1)"] button[data-value="f"]',
    )!;
    button.click();
    expect(socket.sent.length).toBe(before + 1);
    expect(socket.commands().slice(-1)).toEqual(["retract b(1)"]);
    expect(button.classList.contains("on")).toBe(false);

    socket.reply({ id: 2, status: "ok", warnings: [], "state-digest": DIGEST });
    await app.lastSubmission;
    const repainted = root.querySelector(
      '.panel-inputs li[data-atom="b(1)"] button[data-value="f"]',
    )!;
    expect(repainted.classList.contains("on")).toBe(true);
  });

  it("leaves the panel unchanged when the server answers with a warning", async () => {
    const { socket, root, app } = setup();
    await showState(socket, app);
    root
      .querySelector<HTMLButtonElement>(
        '.panel-inputs li[data-atom="a"] button[data-value="f"]',
      )!
      .click();
    socket.reply({
      id: 2,
      status: "ok",
      warnings: ["a is not an input atom"],
      "state-digest": DIGEST,
    });
    await app.lastSubmission;
    const row = root.querySelector('.panel-inputs li[data-atom="a"]')!;
    expect(row.querySelector('button[data-value="t"]')!.classList.contains("on")).toBe(
      true,
    );
    expect(row.querySelector('button[data-value="f"]')!.classList.contains("on")).toBe(
      false,
    );
  });

  it("renders released atoms with disabled controls that emit nothing", async () => {
    const { socket, root, app } = setup();
    await showState(socket, app);
    const before = socket.sent.length;
    const buttons = root.querySelectorAll<HTMLButtonElement>(
      '.panel-released li[data-atom="__e3"] button',
    );
    expect(buttons).toHaveLength(3);
    for (const button of buttons) {
      expect(button.disabled).toBe(true);
      button.click();
    }
    expect(socket.sent.length).toBe(before);
  });
});

describe("assumption panel", () => {
  it("emits one assume command from the assume form", async () => {
    const { socket, root, app } = setup();
    const field = root.querySelector<HTMLInputElement>(".assume-box")!;
    const form = root.querySelector<HTMLFormElement>(".assume-form")!;
    field.value = "not q";
    form.dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
    expect(socket.commands()).toEqual(["assume not q"]);
    socket.reply({ id: 1, status: "ok", warnings: [], "state-digest": DIGEST });
    await app.lastSubmission;
  });

  it("emits one cancel command per cancel click", async () => {
    const { socket, root, app } = setup();
    await showState(socket, app);
    root.querySelector<HTMLButtonElement>(".panel-assumptions .cancel")!.click();
    expect(socket.commands().slice(-1)).toEqual(["cancel not q"]);
    socket.reply({ id: 2, status: "ok", warnings: [], "state-digest": DIGEST });
    await app.lastSubmission;
  });
});

describe("transport loss", () => {
  it("shows the banner, reports inline, and never retries", async () => {
    const { socket, root, app } = setup();
    typeCommand(root, "query a");
    const submission = app.lastSubmission;
    socket.fireClose();
    expect(await submission).toBeNull();

    expect(root.querySelector(".banner")!.classList.contains("hidden")).toBe(false);
    expect(root.querySelector(".log .error")!.textContent).toContain("transport:");
    expect(root.querySelector(".log .error")!.textContent).toContain("not be retried");
    expect(socket.commands()).toEqual(["query a"]);

    const fresh = new FakeSocket();
    const replacement = new SessionClient(fresh, "s");
    fresh.fireOpen();
    app.attachClient(replacement);
    expect(root.querySelector(".banner")!.classList.contains("hidden")).toBe(true);
    expect(fresh.sent).toHaveLength(0);
  });
});
