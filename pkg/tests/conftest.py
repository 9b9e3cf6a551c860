"""Shared pytest wiring: a terminal summary line per release criterion."""

ACCEPTANCE_MODULE = "test_acceptance.py"

# function name -> label printed in the summary, in report order
CRITERIA = {
    "test_frozen_transcript_suite": "frozen transcript renders and parses (<5s)",
    "test_replay_end_to_end": "offline replay end to end (<2s, no network)",
    "test_randomized_edit_invariants": "1000 randomized edit sequences hold invariants",
    "test_button_subtask_mapping": "button to subtask mapping audit",
    "test_multiplicity_phrase_table": "30-phrase multiplicity table at 100%",
    "test_analysis_oracles": "trace analysis matches hand-computed oracles",
    "test_crash_recovery_50_kills": "50 mid-action kills all recover cleanly",
}

_results: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if ACCEPTANCE_MODULE not in report.nodeid:
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if name not in CRITERIA:
        return
    if report.failed:
        _results[name] = "FAIL"
    elif report.when == "call" and report.passed:
        _results.setdefault(name, "PASS")
    elif report.skipped:
        _results.setdefault(name, "SKIP")


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, label in CRITERIA.items():
        outcome = _results.get(name)
        if outcome is None:
            continue
        terminalreporter.write_line(f"{outcome}  {label}")
