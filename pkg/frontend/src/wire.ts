/**
 * Wire protocol codec: 4-byte big-endian length prefix + canonical UTF-8
 * JSON. Canonical means `kind` then `seq` then the remaining fields in
 * alphabetical order, params/args objects with sorted keys and no
 * whitespace, so every adapter language produces identical bytes for
 * equal messages.
 */

export const PROTOCOL_VERSION = "1";
export const MAX_FRAME_BYTES = 1 << 20;
export const DEFAULT_PORT = 7483;

export type Severity = "info" | "violation";
export type StrMap = Record<string, string>;

export type Hello = { kind: "HELLO"; seq: number; component_label: string; protocol_version: string };
export type Event = { kind: "EVENT"; seq: number; context_key: string; event_name: string; params: StrMap };
export type CondReq = { kind: "COND_REQ"; seq: number; args: StrMap; condition_name: string; context_key: string; request_id: number };
export type CondResp = { kind: "COND_RESP"; seq: number; request_id: number; result: boolean };
export type ActReq = { kind: "ACT_REQ"; seq: number; action_name: string; args: StrMap; context_key: string; request_id: number };
export type ActAck = { kind: "ACT_ACK"; seq: number; request_id: number };
export type Verdict = { kind: "VERDICT"; seq: number; context_key: string; severity: Severity; text: string };
export type Bye = { kind: "BYE"; seq: number };

export type WireMessage =
  | Hello | Event | CondReq | CondResp | ActReq | ActAck | Verdict | Bye;

export class DecodeError extends Error {}
export class EncodeError extends Error {}

function sortedMap(map: StrMap): StrMap {
  const out: StrMap = {};
  for (const key of Object.keys(map).sort()) out[key] = map[key];
  return out;
}

/** Body fields per kind, already in canonical (alphabetical) order. */
function canonicalBody(msg: WireMessage): Record<string, unknown> {
  switch (msg.kind) {
    case "HELLO":
      return { component_label: msg.component_label, protocol_version: msg.protocol_version };
    case "EVENT":
      return { context_key: msg.context_key, event_name: msg.event_name, params: sortedMap(msg.params) };
    case "COND_REQ":
      return { args: sortedMap(msg.args), condition_name: msg.condition_name, context_key: msg.context_key, request_id: msg.request_id };
    case "COND_RESP":
      return { request_id: msg.request_id, result: msg.result };
    case "ACT_REQ":
      return { action_name: msg.action_name, args: sortedMap(msg.args), context_key: msg.context_key, request_id: msg.request_id };
    case "ACT_ACK":
      return { request_id: msg.request_id };
    case "VERDICT":
      return { context_key: msg.context_key, severity: msg.severity, text: msg.text };
    case "BYE":
      return {};
  }
}

export function encode(msg: WireMessage): Buffer {
  const obj = { kind: msg.kind, seq: msg.seq, ...canonicalBody(msg) };
  const payload = Buffer.from(JSON.stringify(obj), "utf-8");
  if (payload.length > MAX_FRAME_BYTES) {
    throw new EncodeError(`payload of ${payload.length} bytes exceeds ${MAX_FRAME_BYTES}`);
  }
  const frame = Buffer.alloc(4 + payload.length);
  frame.writeUInt32BE(payload.length, 0);
  payload.copy(frame, 4);
  return frame;
}

function requireString(value: unknown, what: string): string {
  if (typeof value !== "string") throw new DecodeError(`${what} must be a string`);
  return value;
}

function requireInt(value: unknown, what: string): number {
  if (typeof value !== "number" || !Number.isInteger(value) || value < 0) {
    throw new DecodeError(`${what} must be a non-negative integer`);
  }
  return value;
}

function requireKey(value: unknown, what: string): string {
  const s = requireString(value, what);
  if (s.length === 0) throw new DecodeError(`${what} must be non-empty`);
  return s;
}

function requireStrMap(value: unknown, what: string): StrMap {
  if (typeof value !== "object" || value === null || Array.isArray(value)) {
    throw new DecodeError(`${what} must be an object`);
  }
  for (const [k, v] of Object.entries(value)) {
    if (typeof v !== "string") throw new DecodeError(`${what}[${k}] must be a string`);
  }
  return value as StrMap;
}

const FIELDS: Record<string, string[]> = {
  HELLO: ["component_label", "protocol_version"],
  EVENT: ["context_key", "event_name", "params"],
  COND_REQ: ["args", "condition_name", "context_key", "request_id"],
  COND_RESP: ["request_id", "result"],
  ACT_REQ: ["action_name", "args", "context_key", "request_id"],
  ACT_ACK: ["request_id"],
  VERDICT: ["context_key", "severity", "text"],
  BYE: [],
};

function messageFromObject(obj: unknown): WireMessage {
  if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
    throw new DecodeError("payload is not a JSON object");
  }
  const record = obj as Record<string, unknown>;
  const kind = record.kind;
  if (typeof kind !== "string" || !(kind in FIELDS)) {
    throw new DecodeError(`unknown message kind ${JSON.stringify(kind)}`);
  }
  const allowed = new Set(["kind", "seq", ...FIELDS[kind]]);
  for (const key of Object.keys(record)) {
    if (!allowed.has(key)) throw new DecodeError(`unexpected field '${key}' in ${kind}`);
  }
  for (const key of allowed) {
    if (!(key in record)) throw new DecodeError(`missing field '${key}' in ${kind}`);
  }
  const seq = requireInt(record.seq, "seq");
  switch (kind) {
    case "HELLO":
      return { kind, seq, component_label: requireKey(record.component_label, "component_label"),
               protocol_version: requireString(record.protocol_version, "protocol_version") };
    case "EVENT":
      return { kind, seq, context_key: requireKey(record.context_key, "context_key"),
               event_name: requireString(record.event_name, "event_name"),
               params: requireStrMap(record.params, "params") };
    case "COND_REQ":
      return { kind, seq, args: requireStrMap(record.args, "args"),
               condition_name: requireString(record.condition_name, "condition_name"),
               context_key: requireKey(record.context_key, "context_key"),
               request_id: requireInt(record.request_id, "request_id") };
    case "COND_RESP": {
      if (typeof record.result !== "boolean") throw new DecodeError("result must be a boolean");
      return { kind, seq, request_id: requireInt(record.request_id, "request_id"),
               result: record.result };
    }
    case "ACT_REQ":
      return { kind, seq, action_name: requireString(record.action_name, "action_name"),
               args: requireStrMap(record.args, "args"),
               context_key: requireKey(record.context_key, "context_key"),
               request_id: requireInt(record.request_id, "request_id") };
    case "ACT_ACK":
      return { kind, seq, request_id: requireInt(record.request_id, "request_id") };
    case "VERDICT": {
      const severity = requireString(record.severity, "severity");
      if (severity !== "info" && severity !== "violation") {
        throw new DecodeError(`severity must be info|violation, got '${severity}'`);
      }
      return { kind, seq, context_key: requireString(record.context_key, "context_key"),
               severity, text: requireString(record.text, "text") };
    }
    default:
      return { kind: "BYE", seq };
  }
}

/**
 * Decode the first frame in `buffer`. Returns null when the buffer holds
 * only a prefix of a frame; throws DecodeError on malformed input (the
 * connection carrying it must be closed).
 */
export function decode(buffer: Buffer): { message: WireMessage; rest: Buffer } | null {
  if (buffer.length < 4) return null;
  const length = buffer.readUInt32BE(0);
  if (length > MAX_FRAME_BYTES) {
    throw new DecodeError(`declared frame length ${length} exceeds ${MAX_FRAME_BYTES}`);
  }
  if (buffer.length < 4 + length) return null;
  const payload = buffer.subarray(4, 4 + length);
  const rest = buffer.subarray(4 + length);
  let text: string;
  try {
    text = new TextDecoder("utf-8", { fatal: true }).decode(payload);
  } catch (err) {
    throw new DecodeError(`payload is not UTF-8: ${err}`);
  }
  let obj: unknown;
  try {
    obj = JSON.parse(text);
  } catch (err) {
    throw new DecodeError(`payload is not JSON: ${err}`);
  }
  return { message: messageFromObject(obj), rest };
}

/** Incremental decoder for a socket's inbound byte stream. */
export class FrameDecoder {
  private buffer: Buffer = Buffer.alloc(0);

  feed(data: Buffer): WireMessage[] {
    this.buffer = Buffer.concat([this.buffer, data]);
    const out: WireMessage[] = [];
    for (;;) {
      const result = decode(this.buffer);
      if (result === null) return out;
      this.buffer = result.rest;
      out.push(result.message);
    }
  }

  get pendingBytes(): number {
    return this.buffer.length;
  }
}
