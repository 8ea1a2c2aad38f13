"""Operator entry point: validate, compile, monitor, demo.

Exit codes: 0 success, 1 validation/compile failures (including bad
usage), 2 runtime errors such as I/O failures.
"""

from __future__ import annotations

import argparse
import sys
import threading
from importlib import resources
from pathlib import Path

from . import wire
from .adapter import parse_address
from .compiler import (
    default_registry, generate_stub, load_central, load_manifest, split_spec,
    write_central, write_manifest,
)
from .demo import mailer
from .errors import PolyrvError
from .monitor.service import MonitorService
from .speclang import parse_spec, validate_spec

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INVALID)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="polyrv", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="parse and validate a .prv script")
    p_validate.add_argument("spec", type=Path)

    p_compile = sub.add_parser(
        "compile", help="split a script into central config, manifests and stubs")
    p_compile.add_argument("spec", type=Path)
    p_compile.add_argument(
        "--plugins", default="",
        help="comma list of technologies, assigned to component labels in "
             "declaration order; or explicit label=technology pairs; one bare "
             "name applies to every label")
    p_compile.add_argument("--out", type=Path, default=None,
                           help="output directory (default: the spec's directory)")

    p_monitor = sub.add_parser("monitor", help="run the central monitor service")
    p_monitor.add_argument("config", type=Path, help="a .central.json file")
    p_monitor.add_argument("--host", default="127.0.0.1")
    p_monitor.add_argument("--port", type=int, default=wire.DEFAULT_PORT)
    p_monitor.add_argument("--log", type=Path, default=None)
    p_monitor.add_argument("--trace", type=Path, default=None,
                           help="write a frame-level protocol trace to this file")

    p_demo = sub.add_parser("demo", help="run the mailer case-study components")
    p_demo.add_argument("scenario", choices=["mailer"])
    p_demo.add_argument("--monitor", default=None,
                        help="host:port of a running monitor (or POLYRV_MONITOR)")
    p_demo.add_argument("--manifest-dir", type=Path, default=None,
                        help="directory holding mailer.<label>.manifest.json "
                             "(default: compile the bundled spec to a temp dir)")
    p_demo.add_argument("--role", choices=["both", "java", "c"], default="both")
    p_demo.add_argument("--recipients", type=int, default=5)
    p_demo.add_argument("--corrupt-count", action="store_true")
    p_demo.add_argument("--late-blacklist", metavar="ID", default=None)
    return parser


def bundled_spec_text(name: str) -> str:
    return (resources.files("polyrv") / "specs" / name).read_text(encoding="utf-8")


def _cmd_validate(args) -> int:
    ast = parse_spec(args.spec.read_text(encoding="utf-8"))
    report = validate_spec(ast)
    print(report.format())
    return EXIT_OK if report.is_empty else EXIT_INVALID


def _parse_plugin_map(spec_text: str, labels: list[str]) -> dict[str, str]:
    entries = [e for e in spec_text.split(",") if e]
    if not entries:
        return {}
    if all("=" in e for e in entries):
        mapping = dict(e.split("=", 1) for e in entries)
        unknown = set(mapping) - set(labels)
        if unknown:
            raise PolyrvError(f"--plugins names unknown component(s): {sorted(unknown)}")
        return mapping
    if any("=" in e for e in entries):
        raise PolyrvError("--plugins cannot mix bare names with label=technology pairs")
    if len(entries) == 1:
        return {label: entries[0] for label in labels}
    if len(entries) != len(labels):
        raise PolyrvError(
            f"--plugins lists {len(entries)} technologies for {len(labels)} "
            f"component(s) {labels}")
    return dict(zip(labels, entries))


def _cmd_compile(args) -> int:
    ast = parse_spec(args.spec.read_text(encoding="utf-8"))
    report = validate_spec(ast)
    if not report.is_empty:
        print(report.format(), file=sys.stderr)
        return EXIT_INVALID
    config, manifests = split_spec(ast)
    out_dir = args.out if args.out is not None else args.spec.parent
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = args.spec.stem

    write_central(config, out_dir / f"{stem}.central.json")
    written = [f"{stem}.central.json"]
    for manifest in manifests:
        name = f"{stem}.{manifest.component_label}.manifest.json"
        write_manifest(manifest, out_dir / name)
        written.append(name)

    labels = [m.component_label for m in manifests]
    registry = default_registry()
    plugin_map = _parse_plugin_map(args.plugins, labels)
    for manifest in manifests:
        technology = plugin_map.get(manifest.component_label)
        if technology is None:
            continue
        plugin = registry.get(technology)
        stub = generate_stub(manifest, plugin)
        name = f"{stem}.{manifest.component_label}.stub.{plugin.file_extension}"
        (out_dir / name).write_text(stub, encoding="utf-8")
        written.append(name)
    for name in written:
        print(f"wrote {out_dir / name}")
    return EXIT_OK


def _cmd_monitor(args) -> int:
    config = load_central(args.config)
    service = MonitorService(config, args.host, args.port, out=sys.stdout,
                             log_path=args.log, trace_path=args.trace)
    print(f"monitor listening on {service.host}:{service.port}", file=sys.stderr)
    return service.run()


def _demo_manifest_dir(args) -> Path:
    if args.manifest_dir is not None:
        return args.manifest_dir
    import tempfile
    out = Path(tempfile.mkdtemp(prefix="polyrv-demo-"))
    ast = parse_spec(bundled_spec_text("mailer.prv"))
    _, manifests = split_spec(ast)
    for manifest in manifests:
        write_manifest(manifest, out / f"mailer.{manifest.component_label}.manifest.json")
    return out


def _cmd_demo(args) -> int:
    import os
    monitor = args.monitor or os.environ.get("POLYRV_MONITOR")
    if monitor is None:
        print("error: no monitor address (use --monitor or POLYRV_MONITOR)",
              file=sys.stderr)
        return EXIT_INVALID
    parse_address(monitor)
    manifest_dir = _demo_manifest_dir(args)
    scenario = mailer.Scenario(recipients=args.recipients,
                               corrupt_count=args.corrupt_count,
                               late_blacklist=args.late_blacklist)

    def manifest_for(label: str):
        return load_manifest(manifest_dir / f"mailer.{label}.manifest.json")

    if args.role == "both":
        mailer.run_both(monitor, manifest_for(mailer.JAVA_LABEL),
                        manifest_for(mailer.C_LABEL), scenario)
        return EXIT_OK
    if args.role == "java":
        # subprocess protocol: print READY once the mailshot is published,
        # wrap up when stdin closes or delivers a line
        finish = threading.Event()
        ready = threading.Event()
        hooks = mailer.RoleHooks(ready=ready, finish=finish)
        runner = threading.Thread(
            target=mailer.run_java_role,
            args=(monitor, manifest_for(mailer.JAVA_LABEL), scenario, hooks),
            daemon=True)
        runner.start()
        ready.wait(timeout=30)
        print("READY", flush=True)
        sys.stdin.readline()
        finish.set()
        runner.join(timeout=30)
        return EXIT_OK
    mailer.run_c_role(monitor, manifest_for(mailer.C_LABEL), scenario,
                      mailer.RoleHooks())
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "validate": _cmd_validate,
        "compile": _cmd_compile,
        "monitor": _cmd_monitor,
        "demo": _cmd_demo,
    }
    try:
        return handlers[args.command](args)
    except PolyrvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
