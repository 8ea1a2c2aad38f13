/**
 * Mailer demo roles, mirroring the Python component behaviour so either
 * side of the case study can run on this adapter.
 *
 * Role protocol (for an external harness):
 *   java: publishes the mailshot, prints READY, serves blacklist queries,
 *         wraps up when stdin delivers a line or closes.
 *   c:    parses the (possibly corrupted) recipient count, creates one
 *         mail per recipient, exits.
 */

import * as path from "node:path";
import * as readline from "node:readline";
import { loadManifest, eventNamed } from "./manifest.js";
import { Session } from "./session.js";

const MAILSHOT_ID = "mailshot-1";
const JAVA_LABEL = "javaComponent";
const C_LABEL = "cComponent";

type Options = {
  monitor: string;
  manifestDir: string;
  role: "java" | "c";
  recipients: number;
  corruptCount: boolean;
  lateBlacklist: string | null;
};

function parseArgs(argv: string[]): Options {
  const options: Options = {
    monitor: process.env.POLYRV_MONITOR ?? "",
    manifestDir: ".",
    role: "c",
    recipients: 5,
    corruptCount: false,
    lateBlacklist: null,
  };
  for (let i = 0; i < argv.length; i += 1) {
    const arg = argv[i];
    switch (arg) {
      case "--monitor": options.monitor = argv[++i]; break;
      case "--manifest-dir": options.manifestDir = argv[++i]; break;
      case "--role": options.role = argv[++i] as Options["role"]; break;
      case "--recipients": options.recipients = Number(argv[++i]); break;
      case "--corrupt-count": options.corruptCount = true; break;
      case "--late-blacklist": options.lateBlacklist = argv[++i]; break;
      default:
        throw new Error(`unknown argument '${arg}'`);
    }
  }
  if (!options.monitor) throw new Error("no monitor address (--monitor or POLYRV_MONITOR)");
  if (options.role !== "java" && options.role !== "c") {
    throw new Error(`bad role '${options.role}'`);
  }
  return options;
}

function recipientIds(count: number): string[] {
  return Array.from({ length: count }, (_, i) => `u${i + 1}`);
}

async function runJava(options: Options): Promise<void> {
  const manifest = loadManifest(
    path.join(options.manifestDir, `mailer.${JAVA_LABEL}.manifest.json`));
  const blacklist = new Set<string>();
  const session = await Session.connect(options.monitor, JAVA_LABEL, manifest);
  if (manifest.systemside_conditions.some((c) => c.name === "isEmailBlacklisted")) {
    session.registerCondition("isEmailBlacklisted",
                              (args) => blacklist.has(args.custID));
  }
  if (eventNamed(manifest, "callMailingExecution") !== undefined) {
    session.emitEvent("callMailingExecution", MAILSHOT_ID, {
      mailshotID: MAILSHOT_ID,
      javaSubsCount: String(options.recipients),
    });
  }
  if (options.lateBlacklist !== null) {
    // the mailing already started; the filtering pass has run
    blacklist.add(options.lateBlacklist);
  }
  process.stdout.write("READY\n");

  await new Promise<void>((resolve) => {
    const rl = readline.createInterface({ input: process.stdin });
    rl.once("line", () => { rl.close(); resolve(); });
    rl.once("close", () => resolve());
  });
  await session.close();
}

async function runC(options: Options): Promise<void> {
  const manifest = loadManifest(
    path.join(options.manifestDir, `mailer.${C_LABEL}.manifest.json`));
  const session = await Session.connect(options.monitor, C_LABEL, manifest);
  const parsed = options.corruptCount ? options.recipients - 1 : options.recipients;
  if (eventNamed(manifest, "startXMLProcessing") !== undefined) {
    session.emitEvent("startXMLProcessing", MAILSHOT_ID, {
      mailshotID: MAILSHOT_ID,
      c_mailCount: String(parsed),
    });
  }
  if (eventNamed(manifest, "inCreateMail") !== undefined) {
    for (const recipient of recipientIds(options.recipients)) {
      session.emitEvent("inCreateMail", recipient, { custID: recipient });
    }
  }
  await session.close();
}

async function main(): Promise<void> {
  const options = parseArgs(process.argv.slice(2));
  if (options.role === "java") {
    await runJava(options);
  } else {
    await runC(options);
  }
}

main().then(
  () => process.exit(0),
  (err) => {
    console.error(String(err));
    process.exit(2);
  },
);
