# -*- coding=utf-8 -*-
import pathlib
import shutil
import subprocess

import invoke
import parver

ROOT = pathlib.Path(__file__).resolve().parent.parent

PACKAGE_NAME = "opeflow"

INIT_PY = ROOT.joinpath("src", PACKAGE_NAME, "__init__.py")

REL_TYPES = ("major", "minor", "patch")

# the acceptance runs, in the order they are cheapest
DESK_CHECKS = (
    "basis --dmax 4",
    "free-ope --A phi --A phi",
    "scaling --A phi^2 --A phi^2 --B phi^2",
    "assoc --A phi --A phi --A phi^2",
    "trees-check --samples 10000",
    "recursion --A phi --A phi --B phi^2",
)


@invoke.task()
def clean(ctx):
    """Clean previously built package artifacts."""
    for name in ("dist", "build"):
        target = ROOT.joinpath(name)
        if target.exists():
            print(f"[clean] Removing {name}")
            shutil.rmtree(target.as_posix())


def _read_version():
    out = subprocess.check_output(["git", "tag"], encoding="ascii")
    tags = [line.strip() for line in out.split("\n") if line.strip()]
    if not tags:
        return parver.Version.parse("0.0.0")
    return max(parver.Version.parse(v).normalize() for v in tags)


def _read_text_version():
    for line in INIT_PY.read_text().splitlines():
        if line.startswith("__version__"):
            _, _, version_text = line.partition("=")
            return parver.Version.parse(version_text.strip().strip('"')).normalize()
    return _read_version()


def _write_version(v):
    lines = []
    with INIT_PY.open() as f:
        for line in f:
            if line.startswith("__version__ = "):
                line = f'__version__ = "{v}"\n'
            lines.append(line)
    with INIT_PY.open("w", newline="\n") as f:
        f.write("".join(lines))


def _bump_release(version, type_):
    if type_ not in REL_TYPES:
        raise ValueError(f"{type_} not in {REL_TYPES}")
    current_version = version.base_version()
    if version.is_prerelease and type_ == "patch":
        return current_version
    return current_version.bump_release(index=REL_TYPES.index(type_))


@invoke.task(pre=[clean])
def build(ctx):
    ctx.run("python setup.py sdist bdist_wheel")


@invoke.task()
def bump_version(ctx, type_="patch", dry_run=False):
    version = _read_text_version()
    if type_ in ("dev", "pre"):
        new_version = version.bump_release(index=REL_TYPES.index("patch")).bump_dev()
    else:
        new_version = _bump_release(version, type_)
    print(f"[bump] {version} -> {new_version}")
    if not dry_run:
        _write_version(new_version)
    return new_version


@invoke.task()
def generate_news(ctx, yes=False, dry_run=False):
    command = "towncrier"
    if dry_run:
        command = f"{command} --draft"
    elif yes:
        command = f"{command} --yes"
    ctx.run(command)


@invoke.task
def build_docs(ctx):
    ctx.run("sphinx-build -b html docs docs/build/html")


@invoke.task
def desk_check(ctx, out="desk-check"):
    """Run every acceptance command through the CLI, one output folder each."""
    for index, command in enumerate(DESK_CHECKS):
        name = command.split()[0]
        target = pathlib.Path(out) / f"{index:02d}-{name}"
        print(f"[desk-check] opeflow {command}")
        ctx.run(f"python -m opeflow {command} --out {target}", warn=True)
