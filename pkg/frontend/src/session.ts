/**
 * Component-side session: connect to the central monitor, emit events,
 * answer monitor-initiated COND_REQ/ACT_REQ callbacks.
 *
 * Inbound requests are handled in arrival order as socket data arrives;
 * callbacks are synchronous. Closing is a handshake: `close()` sends BYE
 * and resolves once the monitor replies BYE (it holds callback owners
 * open until its event pipeline drains) or the connection ends.
 */

import * as net from "node:net";
import { ComponentManifest, eventNamed } from "./manifest.js";
import {
  Bye, CondResp, ActAck, FrameDecoder, PROTOCOL_VERSION, StrMap, WireMessage,
  encode,
} from "./wire.js";

export type ConditionCallback = (args: StrMap) => boolean;
export type ActionCallback = (args: StrMap) => void;

export class NotInManifestError extends Error {}
export class DuplicateRegistrationError extends Error {}

export function parseAddress(address: string): { host: string; port: number } {
  const at = address.lastIndexOf(":");
  const host = address.slice(0, at);
  const port = Number(address.slice(at + 1));
  if (at < 1 || !Number.isInteger(port)) {
    throw new Error(`bad monitor address '${address}' (want host:port)`);
  }
  return { host, port };
}

export class Session {
  private socket: net.Socket;
  private decoder = new FrameDecoder();
  private outSeq = 0;
  private lastInSeq = 0;
  private conditions = new Map<string, ConditionCallback>();
  private actions = new Map<string, ActionCallback>();
  private closed = false;
  private byeSent = false;
  private finished: Promise<void>;
  private finish!: () => void;

  readonly componentLabel: string;
  readonly manifest: ComponentManifest | null;

  private constructor(socket: net.Socket, componentLabel: string,
                      manifest: ComponentManifest | null) {
    this.socket = socket;
    this.componentLabel = componentLabel;
    this.manifest = manifest;
    this.finished = new Promise((resolve) => { this.finish = resolve; });
    socket.on("data", (data) => this.onData(data));
    socket.on("error", () => this.teardown());
    socket.on("close", () => this.teardown());
  }

  static connect(address: string, componentLabel: string,
                 manifest: ComponentManifest | null = null,
                 timeoutMs = 5000): Promise<Session> {
    if (manifest !== null && manifest.component !== componentLabel) {
      return Promise.reject(new NotInManifestError(
        `manifest is for '${manifest.component}', not '${componentLabel}'`));
    }
    const { host, port } = parseAddress(address);
    return new Promise((resolve, reject) => {
      const socket = net.createConnection({ host, port, noDelay: true });
      const timer = setTimeout(() => {
        socket.destroy();
        reject(new Error(`timeout connecting to ${address}`));
      }, timeoutMs);
      socket.once("connect", () => {
        clearTimeout(timer);
        const session = new Session(socket, componentLabel, manifest);
        session.send({ kind: "HELLO", seq: 0, component_label: componentLabel,
                       protocol_version: PROTOCOL_VERSION });
        resolve(session);
      });
      socket.once("error", (err) => {
        clearTimeout(timer);
        reject(err);
      });
    });
  }

  get connected(): boolean {
    return !this.closed;
  }

  private send(msg: WireMessage): void {
    if (this.closed) throw new Error("session is closed");
    this.outSeq += 1;
    this.socket.write(encode({ ...msg, seq: this.outSeq }));
  }

  /** Fire-and-forget EVENT (no monitor round trip). */
  emitEvent(name: string, contextKey: string, params: StrMap = {}): void {
    if (this.manifest !== null && eventNamed(this.manifest, name) === undefined) {
      throw new NotInManifestError(
        `event '${name}' is not in the manifest for '${this.componentLabel}'`);
    }
    this.send({ kind: "EVENT", seq: 0, context_key: contextKey,
                event_name: name, params });
  }

  registerCondition(name: string, callback: ConditionCallback): void {
    if (this.manifest !== null &&
        !this.manifest.systemside_conditions.some((c) => c.name === name)) {
      throw new NotInManifestError(
        `condition '${name}' is not system-side for '${this.componentLabel}'`);
    }
    if (this.conditions.has(name)) {
      throw new DuplicateRegistrationError(`condition '${name}' already registered`);
    }
    this.conditions.set(name, callback);
  }

  registerAction(name: string, callback: ActionCallback): void {
    if (this.manifest !== null &&
        !this.manifest.systemside_actions.some((a) => a.name === name)) {
      throw new NotInManifestError(
        `action '${name}' is not system-side for '${this.componentLabel}'`);
    }
    if (this.actions.has(name)) {
      throw new DuplicateRegistrationError(`action '${name}' already registered`);
    }
    this.actions.set(name, callback);
  }

  /** Resolves when the monitor says BYE or the connection ends. */
  serve(): Promise<void> {
    return this.finished;
  }

  private onData(data: Buffer): void {
    let messages: WireMessage[];
    try {
      messages = this.decoder.feed(data);
    } catch (err) {
      console.error(`${this.componentLabel}: malformed frame from monitor: ${err}`);
      this.teardown();
      return;
    }
    for (const msg of messages) {
      if (this.closed) return;
      this.handle(msg);
    }
  }

  private handle(msg: WireMessage): void {
    if (msg.seq <= this.lastInSeq) {
      console.error(`${this.componentLabel}: monitor seq went backwards ` +
                    `(${msg.seq} after ${this.lastInSeq})`);
      this.teardown();
      return;
    }
    this.lastInSeq = msg.seq;
    switch (msg.kind) {
      case "COND_REQ": {
        const callback = this.conditions.get(msg.condition_name);
        let result = false;
        if (callback === undefined) {
          console.error(`${this.componentLabel}: COND_REQ for unregistered ` +
                        `condition '${msg.condition_name}'`);
        } else {
          try {
            result = Boolean(callback(msg.args));
          } catch (err) {
            console.error(`${this.componentLabel}: condition '${msg.condition_name}' ` +
                          `threw: ${err}`);
          }
        }
        const resp: CondResp = { kind: "COND_RESP", seq: 0,
                                 request_id: msg.request_id, result };
        this.send(resp);
        return;
      }
      case "ACT_REQ": {
        const callback = this.actions.get(msg.action_name);
        if (callback === undefined) {
          console.error(`${this.componentLabel}: ACT_REQ for unregistered ` +
                        `action '${msg.action_name}'`);
        } else {
          try {
            callback(msg.args);
          } catch (err) {
            console.error(`${this.componentLabel}: action '${msg.action_name}' threw: ${err}`);
          }
        }
        const ack: ActAck = { kind: "ACT_ACK", seq: 0, request_id: msg.request_id };
        this.send(ack);
        return;
      }
      case "VERDICT":
        console.error(`${this.componentLabel}: monitor verdict [${msg.severity}] ` +
                      `${msg.context_key} ${msg.text}`);
        return;
      case "BYE":
        this.teardown();
        return;
      default:
        console.error(`${this.componentLabel}: unexpected ${msg.kind} from monitor`);
        this.teardown();
    }
  }

  /** Send BYE, keep answering requests until the monitor's BYE. */
  close(timeoutMs = 10000): Promise<void> {
    if (this.closed) return Promise.resolve();
    if (!this.byeSent) {
      this.byeSent = true;
      const bye: Bye = { kind: "BYE", seq: 0 };
      try {
        this.send(bye);
      } catch {
        return Promise.resolve();
      }
    }
    const timer = setTimeout(() => this.teardown(), timeoutMs);
    return this.finished.then(() => clearTimeout(timer));
  }

  private teardown(): void {
    if (this.closed) return;
    this.closed = true;
    this.socket.destroy();
    this.finish();
  }
}
