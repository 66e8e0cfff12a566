"""Random, solvable, deduplicated benchmark instances for the four domains,
and assembly of the reference corpus with optimal plans.

Each attempt draws its own RNG from (seed, attempt index), so generation is
reproducible and the expensive solving step can run in parallel without
changing the output.  Instances are deduplicated on the canonical form
(domain tag, sorted init, sorted goal) before any solving happens.
"""

from __future__ import annotations

import hashlib
import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations, product

from .codec import encode_plan, encode_task
from .domains import load_domain
from .grounding import ground_task
from .pddl import Literal, Problem, TypedObject, atom
from .search import SOLVED, UNSOLVABLE, astar_plan

DEFAULT_RANGES: dict[str, dict[str, tuple[int, int]]] = {
    "bw": {"blocks": (2, 5)},
    "hn": {"disks": (2, 5)},
    "gr": {"balls": (2, 5), "robots": (3, 5), "rooms": (2, 4)},
    "dl": {"drivers": (1, 3), "trucks": (1, 3), "packages": (2, 4), "locations": (3, 6)},
}

# consecutive duplicate draws before concluding the space is exhausted
MISS_STREAK_LIMIT = 10_000


class ExhaustionError(RuntimeError):
    """The configuration space cannot yield the requested number of unique
    instances (e.g. two-block blocksworld has only 6 init/goal pairs)."""


@dataclass(frozen=True)
class GeneratorConfig:
    domain: str
    count: int
    seed: int
    ranges: dict[str, tuple[int, int]] = field(default_factory=dict)

    def __post_init__(self):
        if self.domain not in DEFAULT_RANGES:
            raise ValueError(f"unknown domain tag '{self.domain}'")
        if self.count < 1:
            raise ValueError("count must be >= 1")
        merged = dict(DEFAULT_RANGES[self.domain])
        for key, bounds in self.ranges.items():
            if key not in merged:
                raise ValueError(f"unknown range '{key}' for domain '{self.domain}'")
            lo, hi = bounds
            if lo < 1 or hi < lo:
                raise ValueError(f"bad range {key}={bounds}")
            merged[key] = (lo, hi)
        object.__setattr__(self, "ranges", merged)

    def sample_values(self, rng: random.Random) -> dict[str, int]:
        return {key: rng.randint(lo, hi) for key, (lo, hi) in self.ranges.items()}


@dataclass(frozen=True)
class DatasetRecord:
    id: str
    domain: str
    task: str
    plan: str
    plan_length: int
    config: dict[str, int]
    seed: int

    def to_json_line(self) -> str:
        return json.dumps(
            {
                "id": self.id,
                "domain": self.domain,
                "task": self.task,
                "plan": self.plan,
                "plan_length": self.plan_length,
                "config": self.config,
                "seed": self.seed,
            },
            ensure_ascii=False,
        )

    @staticmethod
    def from_json_line(line: str) -> "DatasetRecord":
        raw = json.loads(line)
        return DatasetRecord(
            id=raw["id"],
            domain=raw["domain"],
            task=raw["task"],
            plan=raw["plan"],
            plan_length=raw["plan_length"],
            config=raw.get("config", {}),
            seed=raw.get("seed", 0),
        )


# ---------------------------------------------------------------------------
# Blocksworld


def _set_partitions(items: tuple):
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for partition in _set_partitions(rest):
        yield ((first,),) + partition
        for i, part in enumerate(partition):
            yield partition[:i] + ((first,) + part,) + partition[i + 1 :]


@lru_cache(maxsize=None)
def tower_configurations(n: int) -> tuple[tuple[tuple[str, ...], ...], ...]:
    """All distinct arrangements of b1..bn into unordered stacks of ordered
    blocks; each tower runs bottom to top.  501 configurations at n=5."""
    blocks = tuple(f"b{i}" for i in range(1, n + 1))
    configs = set()
    for partition in _set_partitions(blocks):
        for towers in product(*(permutations(part) for part in partition)):
            configs.add(tuple(sorted(towers)))
    return tuple(sorted(configs))


def _bw_config_atoms(config) -> list[Literal]:
    """Per-block listing in index order: placement atom, then clear if clear."""
    support: dict[str, str | None] = {}
    clear = set()
    for tower in config:
        for i, block in enumerate(tower):
            support[block] = tower[i - 1] if i else None
        clear.add(tower[-1])
    atoms = []
    for block in sorted(support, key=lambda b: int(b[1:])):
        below = support[block]
        atoms.append(atom("ontable", block) if below is None else atom("on", block, below))
        if block in clear:
            atoms.append(atom("clear", block))
    return atoms


def gen_blocksworld(blocks: int, rng: random.Random, name: str = "bw-task") -> Problem:
    configs = tower_configurations(blocks)
    init_cfg = configs[rng.randrange(len(configs))]
    goal_cfg = init_cfg
    while goal_cfg == init_cfg:
        goal_cfg = configs[rng.randrange(len(configs))]
    init = [atom("handempty")] + _bw_config_atoms(init_cfg)
    goal = _bw_config_atoms(goal_cfg)
    objects = tuple(TypedObject(f"b{i}") for i in range(1, blocks + 1))
    return Problem(name, "blocksworld", objects, tuple(init), tuple(goal))


# ---------------------------------------------------------------------------
# Towers of Hanoi

PEGS = ("peg1", "peg2", "peg3")


def _hanoi_smaller_atoms(disks: int) -> list[Literal]:
    atoms = [atom("smaller", peg, f"d{i}") for peg in PEGS for i in range(1, disks + 1)]
    for j in range(1, disks + 1):
        for i in range(j + 1, disks + 1):
            atoms.append(atom("smaller", f"d{i}", f"d{j}"))
    return atoms


def _hanoi_placement_atoms(assignment: tuple[int, ...]) -> list[Literal]:
    """assignment[i] = peg index of disk i+1 (disk 1 is the smallest).  Disks
    on a peg stack in size order, so the assignment determines everything."""
    disks = len(assignment)
    atoms = []
    for i in range(disks):
        disk = f"d{i + 1}"
        support = PEGS[assignment[i]]
        for j in range(i + 1, disks):  # nearest larger disk on the same peg
            if assignment[j] == assignment[i]:
                support = f"d{j + 1}"
                break
        atoms.append(atom("on", disk, support))
        is_top = all(assignment[j] != assignment[i] for j in range(i))
        if is_top:
            atoms.append(atom("clear", disk))
    for p, peg in enumerate(PEGS):
        if all(a != p for a in assignment):
            atoms.append(atom("clear", peg))
    return atoms


def gen_hanoi(disks: int, rng: random.Random, name: str = "hn-task") -> Problem:
    """Half tower-to-tower (the classic puzzle between two random pegs), half
    independent random legal placements."""
    if rng.random() < 0.5:
        src = rng.randrange(3)
        dst = rng.randrange(3)
        while dst == src:
            dst = rng.randrange(3)
        init_assign = (src,) * disks
        goal_assign = (dst,) * disks
    else:
        init_assign = tuple(rng.randrange(3) for _ in range(disks))
        goal_assign = tuple(rng.randrange(3) for _ in range(disks))
    init = _hanoi_smaller_atoms(disks) + _hanoi_placement_atoms(init_assign)
    goal = _hanoi_placement_atoms(goal_assign)
    objects = tuple(TypedObject(f"d{i}") for i in range(1, disks + 1)) + tuple(
        TypedObject(peg) for peg in PEGS
    )
    return Problem(name, "hanoi", objects, tuple(init), tuple(goal))


# ---------------------------------------------------------------------------
# Grippers


def gen_grippers(balls: int, robots: int, rooms: int, rng: random.Random,
                 name: str = "gr-task") -> Problem:
    room_names = [f"room{i}" for i in range(1, rooms + 1)]
    init: list[Literal] = []
    for r in range(1, robots + 1):
        init.append(atom("at-robby", f"robot{r}", rng.choice(room_names)))
        init.append(atom("free", f"robot{r}", f"lgripper{r}"))
        init.append(atom("free", f"robot{r}", f"rgripper{r}"))
    for b in range(1, balls + 1):
        init.append(atom("at", f"ball{b}", rng.choice(room_names)))
    goal = [atom("at", f"ball{b}", rng.choice(room_names)) for b in range(1, balls + 1)]

    objects = (
        tuple(TypedObject(r, "room") for r in room_names)
        + tuple(TypedObject(f"ball{b}", "ball") for b in range(1, balls + 1))
        + tuple(TypedObject(f"robot{r}", "robot") for r in range(1, robots + 1))
        + tuple(
            TypedObject(f"{side}gripper{r}", "gripper")
            for r in range(1, robots + 1)
            for side in ("l", "r")
        )
    )
    return Problem(name, "grippers", objects, tuple(init), tuple(goal))


# ---------------------------------------------------------------------------
# Driverlog


def _connected_links(locations: int, rng: random.Random) -> list[tuple[str, str]]:
    """Random connected undirected graph: a random attachment tree plus a few
    extra edges; each edge is later rendered in both directions."""
    edges = []
    for i in range(2, locations + 1):
        j = rng.randint(1, i - 1)
        edges.append((f"s{j}", f"s{i}"))
    for i in range(1, locations + 1):
        for j in range(i + 1, locations + 1):
            pair = (f"s{i}", f"s{j}")
            if pair not in edges and rng.random() < 0.25:
                edges.append(pair)
    return edges


def gen_driverlog(drivers: int, trucks: int, packages: int, locations: int,
                  rng: random.Random, name: str = "dl-task") -> Problem:
    """Positions are resampled until some driver and truck share a location
    (or no package needs moving): with no path atoms a driver can never walk
    to a truck, so anything else is unsolvable.  The planner still proves
    solvability of every emitted instance when the corpus is built."""
    loc_names = [f"s{i}" for i in range(1, locations + 1)]
    links = _connected_links(locations, rng)
    while True:
        driver_at = [rng.choice(loc_names) for _ in range(drivers)]
        truck_at = [rng.choice(loc_names) for _ in range(trucks)]
        package_at = [rng.choice(loc_names) for _ in range(packages)]
        package_goal = [rng.choice(loc_names) for _ in range(packages)]
        co_located = bool(set(driver_at) & set(truck_at))
        if co_located or package_at == package_goal:
            break

    init: list[Literal] = []
    for d, loc in enumerate(driver_at, start=1):
        init.append(atom("at", f"driver{d}", loc))
    for t, loc in enumerate(truck_at, start=1):
        init.append(atom("at", f"truck{t}", loc))
        init.append(atom("empty", f"truck{t}"))
    for a, b in links:
        init.append(atom("link", a, b))
        init.append(atom("link", b, a))
    for p, loc in enumerate(package_at, start=1):
        init.append(atom("at", f"package{p}", loc))
    goal = [atom("at", f"package{p}", loc) for p, loc in enumerate(package_goal, start=1)]

    objects = (
        tuple(TypedObject(f"driver{d}", "driver") for d in range(1, drivers + 1))
        + tuple(TypedObject(f"truck{t}", "truck") for t in range(1, trucks + 1))
        + tuple(TypedObject(f"package{p}", "obj") for p in range(1, packages + 1))
        + tuple(TypedObject(loc, "location") for loc in loc_names)
    )
    return Problem(name, "driverlog", objects, tuple(init), tuple(goal))


# ---------------------------------------------------------------------------
# Corpus assembly

_GENERATORS = {
    "bw": lambda v, rng, name: gen_blocksworld(v["blocks"], rng, name),
    "hn": lambda v, rng, name: gen_hanoi(v["disks"], rng, name),
    "gr": lambda v, rng, name: gen_grippers(v["balls"], v["robots"], v["rooms"], rng, name),
    "dl": lambda v, rng, name: gen_driverlog(
        v["drivers"], v["trucks"], v["packages"], v["locations"], rng, name
    ),
}


def generate_problem(tag: str, values: dict[str, int], rng: random.Random,
                     name: str = "task") -> Problem:
    return _GENERATORS[tag](values, rng, name)


def instance_seed(seed: int, index: int) -> int:
    digest = hashlib.sha256(f"{seed}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def canonical_key(tag: str, problem: Problem) -> str:
    init = ";".join(sorted(lit.display() for lit in problem.init))
    goal = ";".join(sorted(lit.display() for lit in problem.goal))
    return f"{tag}|{init}|{goal}"


def record_id(key: str) -> str:
    return hashlib.sha256(key.encode()).hexdigest()[:16]


def _solve_reference(args):
    tag, problem, max_expansions, time_limit = args
    task = ground_task(load_domain(tag), problem)
    result = astar_plan(task, "lmcut", max_expansions=max_expansions, time_limit=time_limit)
    if result.status == SOLVED:
        return SOLVED, tuple(a.name for a in result.plan)
    return result.status, None


def build_dataset(
    cfg: GeneratorConfig,
    jobs: int = 1,
    max_expansions: int = 5_000_000,
    time_limit: float = 60.0,
):
    """Yield cfg.count unique DatasetRecords; raises ExhaustionError when the
    configuration space runs dry.  Solving runs in a process pool when
    jobs > 1; output order is by attempt index either way."""
    domain = load_domain(cfg.domain)
    seen: set[str] = set()
    emitted = 0
    attempt = 0
    miss_streak = 0
    exhausted = False
    batch_size = max(16, 4 * jobs)
    pool = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        while emitted < cfg.count and not exhausted:
            batch = []
            while len(batch) < min(batch_size, cfg.count - emitted):
                attempt += 1
                inst_seed = instance_seed(cfg.seed, attempt)
                rng = random.Random(inst_seed)
                values = cfg.sample_values(rng)
                problem = generate_problem(
                    cfg.domain, values, rng, name=f"{cfg.domain}-{attempt:06d}"
                )
                key = canonical_key(cfg.domain, problem)
                if key in seen:
                    miss_streak += 1
                    if miss_streak >= MISS_STREAK_LIMIT:
                        exhausted = True
                        break
                    continue
                miss_streak = 0
                seen.add(key)
                batch.append((key, values, inst_seed, problem))

            solve_args = [
                (cfg.domain, problem, max_expansions, time_limit)
                for _, _, _, problem in batch
            ]
            if pool is not None:
                results = list(pool.map(_solve_reference, solve_args))
            else:
                results = [_solve_reference(a) for a in solve_args]

            for (key, values, inst_seed, problem), (status, plan) in zip(batch, results):
                if status == UNSOLVABLE:
                    continue  # driverlog resampling path; other domains never hit this
                if plan is None:
                    raise RuntimeError(
                        f"planner hit a resource limit on {problem.name}; "
                        f"raise --max-expansions/--time-limit"
                    )
                task_text = encode_task(domain, problem).rendered
                plan_text = encode_plan(plan).rendered
                yield DatasetRecord(
                    id=record_id(key),
                    domain=cfg.domain,
                    task=task_text,
                    plan=plan_text,
                    plan_length=len(plan),
                    config=values,
                    seed=inst_seed,
                )
                emitted += 1
        if exhausted and emitted < cfg.count:
            raise ExhaustionError(
                f"no new unique instance after {MISS_STREAK_LIMIT} attempts "
                f"({emitted} of {cfg.count} generated)"
            )
    finally:
        if pool is not None:
            pool.shutdown()
