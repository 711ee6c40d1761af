import type { SocketLike } from "../src/client.js";

/** In-memory stand-in for a WebSocket: captures frames, replays scripted
 * responses, and fires lifecycle events on demand. */
export class FakeSocket implements SocketLike {
  sent: string[] = [];
  closed = false;
  onopen: ((event: unknown) => void) | null = null;
  onmessage: ((event: { data: unknown }) => void) | null = null;
  onclose: ((event: unknown) => void) | null = null;

  send(data: string): void {
    this.sent.push(data);
  }

  close(): void {
    this.closed = true;
    this.fireClose();
  }

  fireOpen(): void {
    this.onopen?.({});
  }

  fireClose(): void {
    this.onclose?.({});
  }

  reply(response: object): void {
    this.onmessage?.({ data: JSON.stringify(response) });
  }

  raw(data: unknown): void {
    this.onmessage?.({ data });
  }

  lastRequest(): { id: number; session: string; command: string } {
    const frame = this.sent[this.sent.length - 1];
    if (frame === undefined) throw new Error("nothing was sent");
    return JSON.parse(frame);
  }

  commands(): string[] {
    return this.sent.map((frame) => JSON.parse(frame).command as string);
  }
}
