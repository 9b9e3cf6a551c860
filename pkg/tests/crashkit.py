"""Fork-based kill harness for the session store's commit path.

A child process applies one action with a fault armed at a chosen commit
point and hard-exits mid-commit. The parent then recovers the directory with
a fresh service and compares the recovered export against a pristine
reference run that never crashed. Scenario completions are deterministic, so
the reference and the victim agree byte-for-byte whenever the same prefix of
actions committed.
"""

import os
from pathlib import Path

from draftsmith.llm import MockBackend
from draftsmith.scenarios import RESTAURANT_PROMPT, scenario_backend
from draftsmith.service import FAULT_EXIT_CODE, FaultPlan, SessionService

KILL_POINTS = ("torn_event", "after_event", "after_model")
# events committed by seed_session: create, begin, generateFieldsAndMethods
SEED_EVENTS = 3


def build_actions(n: int) -> list[tuple[str, dict]]:
    """A mix of plain edits and synthesis buttons to crash in the middle of."""
    actions = []
    for i in range(n):
        if i % 5 == 4:
            actions.append(("autoAddField", {"object": "customer"}))
        elif i % 3 == 2:
            actions.append(("autoAddMethod", {"object": "customer"}))
        else:
            actions.append(("addObject", {"name": f"extra {i}"}))
    return actions


def seed_session(data_dir) -> str:
    svc = SessionService(data_dir, backend=scenario_backend())
    sid = svc.create_session(RESTAURANT_PROMPT)["id"]
    svc.apply_action(sid, "begin")
    svc.apply_action(sid, "generateFieldsAndMethods")
    return sid


def reference_snapshots(data_dir, actions: list[tuple[str, dict]]) -> list[str]:
    """Exports after the seed and then after each action, from a run that
    never crashes."""
    svc = SessionService(data_dir, backend=scenario_backend())
    sid = seed_session(data_dir)
    snapshots = [svc.export_text(sid)]
    for action, payload in actions:
        svc.apply_action(sid, action, payload)
        snapshots.append(svc.export_text(sid))
    return snapshots


def committed_events(data_dir, sid: str) -> int:
    raw = (Path(data_dir) / sid / "events.jsonl").read_bytes()
    return raw.count(b"\n")


def kill_mid_action(data_dir, sid: str, action: str, payload: dict, point: str) -> int:
    """Run one action in a forked child with the fault armed; returns the
    child's exit status."""
    pid = os.fork()
    if pid == 0:
        try:
            svc = SessionService(data_dir, backend=scenario_backend())
            svc.store.fault = FaultPlan(point)
            svc.apply_action(sid, action, payload)
            os._exit(1)  # the fault should have fired before this
        except BaseException:
            os._exit(2)
    _, status = os.waitpid(pid, 0)
    return os.WEXITSTATUS(status)


def recovered_export(data_dir, sid: str) -> str:
    return SessionService(data_dir, backend=MockBackend()).export_text(sid)


def run_kill_loop(tmp_path, rounds: int):
    """Kill the service mid-action `rounds` times; after each kill, assert the
    recovered state equals the reference state for the committed prefix.
    Returns (kills, commits) for reporting."""
    victim_dir = Path(tmp_path) / "victim"
    reference_dir = Path(tmp_path) / "reference"
    actions = build_actions(rounds)
    snapshots = reference_snapshots(reference_dir, actions)
    sid = seed_session(victim_dir)
    commits = 0
    for i in range(rounds):
        done = committed_events(victim_dir, sid) - SEED_EVENTS
        assert done <= len(actions) - 1, "victim ran out of scripted actions"
        action, payload = actions[done]
        point = KILL_POINTS[i % len(KILL_POINTS)]
        status = kill_mid_action(victim_dir, sid, action, payload, point)
        assert status == FAULT_EXIT_CODE, f"round {i}: child exited {status}, fault never fired"
        now_done = committed_events(victim_dir, sid) - SEED_EVENTS
        if point == "torn_event":
            assert now_done == done, f"round {i}: torn write must not commit"
        else:
            assert now_done == done + 1, f"round {i}: event line was fsynced before the kill"
        commits += now_done - done
        assert recovered_export(victim_dir, sid) == snapshots[now_done], (
            f"round {i} ({point}): recovered state diverges from the committed prefix"
        )
    return rounds, commits
