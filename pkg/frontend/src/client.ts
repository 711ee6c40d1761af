/** Session client over a WebSocket-like channel. One command is in flight
 * at a time; further submissions queue client-side so the server sees them
 * in exactly the order they were issued. A lost connection rejects every
 * outstanding command: nothing is ever retried silently. */

import type { Request, Response } from "./protocol.js";
import { isResponse } from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((event: unknown) => void) | null;
  onmessage: ((event: { data: unknown }) => void) | null;
  onclose: ((event: unknown) => void) | null;
}

export class TransportClosed extends Error {
  readonly command: string;

  constructor(command: string) {
    super(`connection lost; ${JSON.stringify(command)} was not answered and will not be retried`);
    this.name = "TransportClosed";
    this.command = command;
  }
}

interface PendingCommand {
  id: number;
  command: string;
  sent: boolean;
  resolve: (response: Response) => void;
  reject: (reason: Error) => void;
}

export type ClientState = "connecting" | "open" | "closed";

export class SessionClient {
  readonly session: string;
  onDisconnect: (() => void) | null = null;

  private readonly socket: SocketLike;
  private readonly queue: PendingCommand[] = [];
  private nextId = 1;
  private state: ClientState;

  constructor(socket: SocketLike, session: string, alreadyOpen = false) {
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

  get connected(): boolean {
    return this.state === "open";
  }

  /** The command currently awaiting its response, if any. */
  get inFlight(): string | null {
    const head = this.queue[0];
    return head !== undefined && head.sent ? head.command : null;
  }

  submit(command: string): Promise<Response> {
    if (this.state === "closed") {
      return Promise.reject(new TransportClosed(command));
    }
    return new Promise<Response>((resolve, reject) => {
      this.queue.push({ id: this.nextId++, command, sent: false, resolve, reject });
      this.pump();
    });
  }

  close(): void {
    this.socket.close();
  }

  private pump(): void {
    const head = this.queue[0];
    if (this.state !== "open" || head === undefined || head.sent) return;
    const request: Request = { id: head.id, session: this.session, command: head.command };
    head.sent = true;
    this.socket.send(JSON.stringify(request));
  }

  private receive(data: string): void {
    let parsed: unknown;
    try {
      parsed = JSON.parse(data);
    } catch {
      return; // not a protocol frame; ignore
    }
    if (!isResponse(parsed)) return;
    const head = this.queue[0];
    if (head === undefined || !head.sent || parsed.id !== head.id) return;
    this.queue.shift();
    head.resolve(parsed);
    this.pump();
  }

  private drop(): void {
    if (this.state === "closed") return;
    this.state = "closed";
    const outstanding = this.queue.splice(0, this.queue.length);
    for (const pending of outstanding) {
      pending.reject(new TransportClosed(pending.command));
    }
    if (this.onDisconnect !== null) this.onDisconnect();
  }
}
