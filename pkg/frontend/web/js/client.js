/** Session client over a WebSocket-like channel. One command is in flight
 * at a time; further submissions queue client-side so the server sees them
 * in exactly the order they were issued. A lost connection rejects every
 * outstanding command: nothing is ever retried silently. */
import { isResponse } from "./protocol.js";
export class TransportClosed extends Error {
    command;
    constructor(command) {
        super(`connection lost; ${JSON.stringify(command)} was not answered and will not be retried`);
        this.name = "TransportClosed";
        this.command = command;
    }
}
export class SessionClient {
    session;
    onDisconnect = null;
    socket;
    queue = [];
    nextId = 1;
    state;
    constructor(socket, session, alreadyOpen = false) {
        this.socket = socket;
        this.session = session;
        this.state = alreadyOpen ? "open" : "connecting";
        socket.onopen = () => {
            this.state = "open";
            this.pump();
        };
        socket.onmessage = (event) => this.receive(String(event.data));
        socket.onclose = () => this.drop();
    }
    get connected() {
        return this.state === "open";
    }
    /** The command currently awaiting its response, if any. */
    get inFlight() {
        const head = this.queue[0];
        return head !== undefined && head.sent ? head.command : null;
    }
    submit(command) {
        if (this.state === "closed") {
            return Promise.reject(new TransportClosed(command));
        }
        return new Promise((resolve, reject) => {
            this.queue.push({ id: this.nextId++, command, sent: false, resolve, reject });
            this.pump();
        });
    }
    close() {
        this.socket.close();
    }
    pump() {
        const head = this.queue[0];
        if (this.state !== "open" || head === undefined || head.sent)
            return;
        const request = { id: head.id, session: this.session, command: head.command };
        head.sent = true;
        this.socket.send(JSON.stringify(request));
    }
    receive(data) {
        let parsed;
        try {
            parsed = JSON.parse(data);
        }
        catch {
            return; // not a protocol frame; ignore
        }
        if (!isResponse(parsed))
            return;
        const head = this.queue[0];
        if (head === undefined || !head.sent || parsed.id !== head.id)
            return;
        this.queue.shift();
        head.resolve(parsed);
        this.pump();
    }
    drop() {
        if (this.state === "closed")
            return;
        this.state = "closed";
        const outstanding = this.queue.splice(0, this.queue.length);
        for (const pending of outstanding) {
            pending.reject(new TransportClosed(pending.command));
        }
        if (this.onDisconnect !== null)
            this.onDisconnect();
    }
}
