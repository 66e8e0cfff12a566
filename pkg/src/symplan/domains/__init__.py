"""Bundled benchmark domains and the decode-side type registry."""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources

from ..pddl import Domain, parse_domain

DOMAIN_TAGS = ("bw", "hn", "gr", "dl")

_TAG_TO_FILE = {
    "bw": "blocksworld.pddl",
    "hn": "hanoi.pddl",
    "gr": "grippers.pddl",
    "dl": "driverlog.pddl",
}

_NAME_TO_TAG = {
    "blocksworld": "bw",
    "hanoi": "hn",
    "grippers": "gr",
    "driverlog": "dl",
}

# Object-name patterns used to refine type recovery when predicate signatures
# alone are ambiguous (driverlog drivers only ever occur in `at`, whose slot
# type is the supertype `locatable`).
_NAME_RULES = {
    "dl": (
        (re.compile(r"^driver\d+$"), "driver"),
        (re.compile(r"^truck\d+$"), "truck"),
        (re.compile(r"^package\d+$"), "obj"),
        (re.compile(r"^s\d+$"), "location"),
    ),
}


def domain_source(tag: str) -> str:
    return resources.files(__package__).joinpath(_TAG_TO_FILE[tag]).read_text("utf-8")


@lru_cache(maxsize=None)
def load_domain(tag: str) -> Domain:
    if tag not in _TAG_TO_FILE:
        raise KeyError(f"unknown domain tag '{tag}' (expected one of {DOMAIN_TAGS})")
    return parse_domain(domain_source(tag))


def tag_for_domain(name: str) -> str | None:
    return _NAME_TO_TAG.get(name)


def name_rules(tag: str):
    return _NAME_RULES.get(tag, ())


@lru_cache(maxsize=None)
def default_registry() -> tuple[tuple[Domain, tuple], ...]:
    """(domain, name_rules) pairs for all bundled domains, decode lookup order."""
    return tuple((load_domain(tag), name_rules(tag)) for tag in DOMAIN_TAGS)
