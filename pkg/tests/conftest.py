import pytest

_criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    name = getattr(item, "originalname", item.name)
    if not name.startswith("test_criterion_"):
        return
    title = (item.function.__doc__ or name).strip().splitlines()[0]
    num = int(name.split("_")[2])
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _criteria[num] = ("PASS" if rep.passed else "FAIL", title)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        verdict, title = _criteria[num]
        terminalreporter.write_line(f"{verdict}  criterion {num:>2}: {title}")
