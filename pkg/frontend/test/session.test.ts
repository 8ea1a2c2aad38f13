/** Session behaviour against a scripted monitor-side endpoint. */

import * as net from "node:net";
import { afterEach, describe, expect, test } from "vitest";
import { Session } from "../src/session.js";
import { FrameDecoder, WireMessage, encode } from "../src/wire.js";

type Scripted = {
  server: net.Server;
  address: string;
  received: WireMessage[];
  sockets: net.Socket[];
  waitFor: (count: number) => Promise<WireMessage[]>;
};

const cleanups: (() => void)[] = [];

function startScriptedMonitor(
  onMessage?: (msg: WireMessage, socket: net.Socket, outSeq: () => number) => void,
): Promise<Scripted> {
  const received: WireMessage[] = [];
  const sockets: net.Socket[] = [];
  const waiters: { count: number; resolve: (msgs: WireMessage[]) => void }[] = [];
  const server = net.createServer((socket) => {
    sockets.push(socket);
    const decoder = new FrameDecoder();
    let seq = 0;
    const outSeq = () => ++seq;
    socket.on("data", (data) => {
      for (const msg of decoder.feed(data)) {
        received.push(msg);
        onMessage?.(msg, socket, outSeq);
        for (const waiter of waiters.splice(0)) {
          if (received.length >= waiter.count) waiter.resolve(received);
          else waiters.push(waiter);
        }
      }
    });
  });
  cleanups.push(() => server.close());
  return new Promise((resolve) => {
    server.listen(0, "127.0.0.1", () => {
      const addr = server.address() as net.AddressInfo;
      resolve({
        server,
        address: `127.0.0.1:${addr.port}`,
        received,
        sockets,
        waitFor: (count) => new Promise((res) => {
          if (received.length >= count) res(received);
          else waiters.push({ count, resolve: res });
        }),
      });
    });
  });
}

afterEach(() => {
  for (const fn of cleanups.splice(0)) fn();
});

describe("Session", () => {
  test("HELLO first, events in order, strictly increasing seq", async () => {
    const monitor = await startScriptedMonitor();
    const session = await Session.connect(monitor.address, "cComponent");
    session.emitEvent("startXMLProcessing", "m1",
                      { mailshotID: "m1", c_mailCount: "5" });
    session.emitEvent("inCreateMail", "u1", { custID: "u1" });
    const msgs = await monitor.waitFor(3);
    expect(msgs.map((m) => m.kind)).toEqual(["HELLO", "EVENT", "EVENT"]);
    expect(msgs.map((m) => m.seq)).toEqual([1, 2, 3]);
    expect(msgs[0]).toMatchObject({ component_label: "cComponent",
                                    protocol_version: "1" });
    await session.close(100);
  });

  test("answers COND_REQ with matching request_id", async () => {
    const monitor = await startScriptedMonitor((msg, socket, outSeq) => {
      if (msg.kind === "EVENT") {
        socket.write(encode({ kind: "COND_REQ", seq: outSeq(), args: { custID: "u3" },
                              condition_name: "isEmailBlacklisted",
                              context_key: "u3", request_id: 17 }));
      }
    });
    const session = await Session.connect(monitor.address, "javaComponent");
    session.registerCondition("isEmailBlacklisted", (args) => args.custID === "u3");
    session.emitEvent("poke", "u3", { custID: "u3" });
    const msgs = await monitor.waitFor(3);
    const resp = msgs[2];
    expect(resp).toMatchObject({ kind: "COND_RESP", request_id: 17, result: true });
    await session.close(100);
  });

  test("unregistered condition answers false", async () => {
    const monitor = await startScriptedMonitor((msg, socket, outSeq) => {
      if (msg.kind === "HELLO") {
        socket.write(encode({ kind: "COND_REQ", seq: outSeq(), args: {},
                              condition_name: "mystery", context_key: "k",
                              request_id: 1 }));
      }
    });
    const session = await Session.connect(monitor.address, "javaComponent");
    const msgs = await monitor.waitFor(2);
    expect(msgs[1]).toMatchObject({ kind: "COND_RESP", request_id: 1, result: false });
    await session.close(100);
  });

  test("ACT_REQ runs the callback and is ACKed", async () => {
    const ran: Record<string, string>[] = [];
    const monitor = await startScriptedMonitor((msg, socket, outSeq) => {
      if (msg.kind === "HELLO") {
        socket.write(encode({ kind: "ACT_REQ", seq: outSeq(), action_name: "fix",
                              args: { v: "1" }, context_key: "k", request_id: 4 }));
      }
    });
    const session = await Session.connect(monitor.address, "main");
    session.registerAction("fix", (args) => ran.push(args));
    const msgs = await monitor.waitFor(2);
    expect(msgs[1]).toMatchObject({ kind: "ACT_ACK", request_id: 4 });
    expect(ran).toEqual([{ v: "1" }]);
    await session.close(100);
  });

  test("close sends BYE and resolves on the monitor's BYE", async () => {
    const monitor = await startScriptedMonitor((msg, socket, outSeq) => {
      if (msg.kind === "BYE") {
        socket.write(encode({ kind: "BYE", seq: outSeq() }));
      }
    });
    const session = await Session.connect(monitor.address, "cComponent");
    await session.close(5000);
    const msgs = await monitor.waitFor(2);
    expect(msgs[1].kind).toBe("BYE");
    expect(session.connected).toBe(false);
  });

  test("manifest gates emit and registration names", async () => {
    const monitor = await startScriptedMonitor();
    const manifest = {
      component: "cComponent",
      monitor_address: monitor.address,
      events: [{ name: "inCreateMail", trigger: "create_mail",
                 trigger_args: ["custID"], params: ["custID"], context_index: 0 }],
      systemside_conditions: [],
      systemside_actions: [],
      systemside_state: [],
    };
    const session = await Session.connect(monitor.address, "cComponent", manifest);
    expect(() => session.emitEvent("reboot", "k")).toThrow(/not in the manifest/);
    expect(() => session.registerCondition("isEmailBlacklisted", () => true))
      .toThrow(/not system-side/);
    session.emitEvent("inCreateMail", "u1", { custID: "u1" });
    await monitor.waitFor(2);
    await session.close(100);
  });

  test("connection refused rejects", async () => {
    const probe = net.createServer();
    await new Promise<void>((resolve) => probe.listen(0, "127.0.0.1", resolve));
    const addr = probe.address() as net.AddressInfo;
    await new Promise<void>((resolve) => probe.close(() => resolve()));
    await expect(Session.connect(`127.0.0.1:${addr.port}`, "main"))
      .rejects.toThrow();
  });
});
