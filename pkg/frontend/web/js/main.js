/** Browser bootstrap: open a WebSocket back to the host that served this
 * page, bind the console to it, and create (or rejoin) the session. */
import { SessionClient } from "./client.js";
import { ConsoleApp } from "./view.js";
const SESSION = "console";
function openSocket() {
    const scheme = location.protocol === "https:" ? "wss" : "ws";
    return new WebSocket(`${scheme}://${location.host}/`);
}
let app = null;
async function boot() {
    const client = new SessionClient(openSocket(), SESSION);
    const root = document.getElementById("app");
    if (root === null)
        throw new Error("missing #app container");
    if (app === null) {
        app = new ConsoleApp(document, root, client, { reconnect: () => void boot() });
    }
    else {
        app.attachClient(client);
    }
    // an "already exists" error on rejoin is fine; the state refresh shows
    // whatever the session currently holds either way
    const created = await app.submitCommand("create");
    if (created !== null) {
        await app.submitCommand("state");
    }
}
void boot();
