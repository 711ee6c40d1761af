/** DOM console bound to one session: a command box with history on the
 * left, a state inspector on the right. Every control speaks the shell
 * grammar through the session client, and panel state changes only when a
 * server response confirms it. */
import { looksLikeStateDump, parseStateDump, } from "./dump.js";
const TOGGLE_VERB = {
    t: "assert",
    u: "open",
    f: "retract",
};
const VALUES = ["t", "u", "f"];
export class ConsoleApp {
    /** Resolves when the most recently submitted command has been rendered. */
    lastSubmission = Promise.resolve(null);
    client;
    doc;
    options;
    banner;
    log;
    box;
    prompt;
    digestLine;
    panels = new Map();
    history = [];
    historyCursor = 0;
    inputs = new Map();
    released = [];
    constructor(doc, root, client, options = {}) {
        this.doc = doc;
        this.options = options;
        this.client = client;
        root.textContent = "";
        root.classList.add("console");
        this.banner = this.el("div", "banner hidden");
        this.banner.append(this.text("span", "connection lost — outstanding commands were not retried", ""));
        const reconnect = this.text("button", "reconnect", "reconnect-button");
        reconnect.addEventListener("click", () => this.options.reconnect?.());
        this.banner.append(reconnect);
        root.append(this.banner);
        const main = this.el("div", "main");
        root.append(main);
        const terminal = this.el("section", "terminal");
        this.log = this.el("div", "log");
        const form = this.el("form", "command-form");
        this.prompt = this.text("span", "?-", "prompt");
        this.box = this.el("input", "command-box");
        this.box.setAttribute("autocomplete", "off");
        this.box.setAttribute("spellcheck", "false");
        form.append(this.prompt, this.box);
        form.addEventListener("submit", (event) => {
            event.preventDefault();
            const line = this.box.value;
            this.box.value = "";
            this.lastSubmission = this.submitCommand(line);
        });
        this.box.addEventListener("keydown", (event) => {
            const key = event.key;
            if (key === "ArrowUp")
                this.recall(-1);
            else if (key === "ArrowDown")
                this.recall(1);
            else
                return;
            event.preventDefault();
        });
        terminal.append(this.log, form);
        main.append(terminal);
        const inspector = this.el("aside", "inspector");
        this.digestLine = this.el("div", "digest");
        const refresh = this.text("button", "refresh state", "refresh-button");
        refresh.addEventListener("click", () => {
            this.lastSubmission = this.submitCommand("state");
        });
        inspector.append(this.digestLine, refresh);
        for (const name of ["rules", "inputs", "assumptions", "show", "released"]) {
            const panel = this.el("section", `panel panel-${name}`);
            panel.append(this.text("h3", name, ""));
            if (name === "assumptions")
                panel.append(this.assumeForm());
            const list = this.el("ul", "");
            panel.append(list);
            this.panels.set(name, list);
            inspector.append(panel);
        }
        main.append(inspector);
        this.attachClient(client);
    }
    /** Swap in a fresh client after a reconnect; panels stay until the next
     * server refresh. */
    attachClient(client) {
        this.client = client;
        client.onDisconnect = () => this.banner.classList.remove("hidden");
        this.banner.classList.add("hidden");
    }
    get session() {
        return this.client.session;
    }
    /** Send one command line and render whatever comes back. Resolves null
     * when the transport died first; the loss is rendered inline and the
     * command is not retried. */
    async submitCommand(line) {
        const trimmed = line.trim();
        if (trimmed === "")
            return null;
        this.history.push(line);
        this.historyCursor = this.history.length;
        this.echo(line);
        let response;
        try {
            response = await this.client.submit(line);
        }
        catch (error) {
            this.append("error", `transport: ${error.message}`);
            return null;
        }
        this.renderResponse(response);
        return response;
    }
    /** Three-state control click: exactly one protocol command; the panel
     * changes only once the server confirms it applied. */
    async toggleInput(atom, value) {
        const response = await this.submitCommand(`${TOGGLE_VERB[value]} ${atom}`);
        if (response !== null &&
            response.status === "ok" &&
            (response.warnings ?? []).length === 0) {
            this.inputs.set(atom, value);
            this.paintInputs();
        }
    }
    async cancelAssumption(atom, value) {
        const literal = value === "t" ? atom : `not ${atom}`;
        await this.submitCommand(`cancel ${literal}`);
    }
    // rendering
    renderResponse(response) {
        for (const warning of response.warnings ?? []) {
            this.append("warn", `warning: ${warning}`);
        }
        if (response.status === "error") {
            this.append("error", `error: ${response.message ?? "unknown error"}`);
        }
        else if (response.message !== undefined) {
            this.append("message", response.message);
            if (looksLikeStateDump(response.message)) {
                const dump = parseStateDump(response.message);
                if (dump !== null)
                    this.applyDump(dump);
            }
        }
        if (response.models !== undefined) {
            response.models.forEach((model, index) => {
                const block = this.el("div", "answer");
                block.append(this.text("div", `Answer: ${index + 1}`, "answer-count"));
                block.append(this.text("div", model.join(" "), "answer-atoms"));
                this.log.append(block);
            });
        }
        if (response.consolidated !== undefined) {
            this.append("consolidated", response.consolidated.join(" "));
        }
        if (response.sat !== undefined) {
            const badge = this.text("span", response.sat, `badge ${response.sat.toLowerCase()}`);
            const row = this.el("div", "line");
            row.append(badge);
            this.log.append(row);
        }
        this.prompt.textContent = response.pending === true ? ".." : "?-";
        const digest = response["state-digest"];
        if (digest !== undefined)
            this.renderDigest(digest);
        this.scrollLog();
    }
    renderDigest(digest) {
        this.digestLine.textContent =
            `rules ${digest.rules} · inputs ${digest.inputs} · ` +
                `i ${digest.i_true}t/${digest.i_open}u · ` +
                `j ${digest.j_true}t/${digest.j_false}f`;
    }
    applyDump(dump) {
        this.inputs = new Map(dump.inputs.map((entry) => [entry.atom, entry.value]));
        this.released = [...dump.released];
        this.paintList("rules", dump.rules);
        this.paintInputs();
        this.paintAssumptions(dump.assumptions);
        this.paintList("show", dump.shows);
        this.paintReleased();
    }
    paintList(panel, lines) {
        const list = this.panels.get(panel);
        list.textContent = "";
        for (const line of lines) {
            const item = this.el("li", "");
            item.append(this.text("code", line, ""));
            list.append(item);
        }
    }
    paintInputs() {
        const list = this.panels.get("inputs");
        list.textContent = "";
        for (const [atom, value] of this.inputs) {
            list.append(this.inputRow(atom, value, false));
        }
    }
    paintReleased() {
        const list = this.panels.get("released");
        list.textContent = "";
        for (const atom of this.released) {
            list.append(this.inputRow(atom, null, true));
        }
    }
    inputRow(atom, value, disabled) {
        const row = this.el("li", "input-row");
        row.setAttribute("data-atom", atom);
        row.append(this.text("code", atom, "atom"));
        const group = this.el("span", "tuf");
        for (const candidate of VALUES) {
            const button = this.text("button", candidate, "toggle");
            button.setAttribute("data-value", candidate);
            button.setAttribute("type", "button");
            if (candidate === value)
                button.classList.add("on");
            if (disabled)
                button.disabled = true;
            else {
                button.addEventListener("click", () => {
                    this.lastSubmission = this.toggleInput(atom, candidate).then(() => null);
                });
            }
            group.append(button);
        }
        row.append(group);
        return row;
    }
    paintAssumptions(entries) {
        const list = this.panels.get("assumptions");
        list.textContent = "";
        for (const entry of entries) {
            const row = this.el("li", "assumption-row");
            const literal = entry.value === "t" ? entry.atom : `not ${entry.atom}`;
            row.setAttribute("data-literal", literal);
            row.append(this.text("code", literal, ""));
            const cancel = this.text("button", "cancel", "cancel");
            cancel.setAttribute("type", "button");
            cancel.addEventListener("click", () => {
                this.lastSubmission = this.cancelAssumption(entry.atom, entry.value).then(() => null);
            });
            row.append(cancel);
            list.append(row);
        }
    }
    assumeForm() {
        const form = this.el("form", "assume-form");
        const field = this.el("input", "assume-box");
        field.setAttribute("placeholder", "literal, e.g. not q");
        const add = this.text("button", "assume", "assume-button");
        add.setAttribute("type", "submit");
        form.append(field, add);
        form.addEventListener("submit", (event) => {
            event.preventDefault();
            const literal = field.value.trim();
            field.value = "";
            if (literal !== "") {
                this.lastSubmission = this.submitCommand(`assume ${literal}`);
            }
        });
        return form;
    }
    recall(step) {
        const next = this.historyCursor + step;
        if (next < 0 || next > this.history.length)
            return;
        this.historyCursor = next;
        this.box.value = next === this.history.length ? "" : this.history[next];
    }
    echo(line) {
        this.append("cmd", `?- ${line}`);
    }
    append(cls, content) {
        this.log.append(this.text("div", content, cls));
        this.scrollLog();
    }
    scrollLog() {
        this.log.scrollTop = this.log.scrollHeight;
    }
    el(tag, cls) {
        const node = this.doc.createElement(tag);
        if (cls !== "")
            node.className = cls;
        return node;
    }
    text(tag, content, cls) {
        const node = this.el(tag, cls);
        node.textContent = content;
        return node;
    }
}
